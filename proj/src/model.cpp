#include "latfield/model.hpp"

#include <cmath>
#include <sstream>

namespace latfield {

CouplingSpec CouplingSpec::gaussian(double amplitude, double sigma, int d, int n) {
    CouplingSpec spec;
    CouplingTerm term;
    term.amplitude = RVec::Constant(n, amplitude);
    term.sigma = sigma;
    term.center = RVec::Zero(d);
    spec.terms.push_back(term);
    return spec;
}

Vec CouplingSpec::fourier(const RVec& xi) const {
    if (terms.empty()) return Vec();
    const int n = static_cast<int>(terms.front().amplitude.size());
    Vec out = Vec::Zero(n);
    for (const auto& term : terms) {
        const int d = static_cast<int>(xi.size());
        const double s2 = term.sigma * term.sigma;
        double scale = std::pow(2.0 * pi, 0.5 * d) * std::pow(term.sigma, d) *
                       std::exp(-0.5 * s2 * xi.squaredNorm());
        cplx phase = std::exp(cplx(0.0, xi.dot(term.center)));
        out += (scale * phase) * term.amplitude.cast<cplx>();
    }
    return out;
}

Vec CouplingSpec::fourier_grad(const RVec& xi, int axis) const {
    if (terms.empty()) return Vec();
    const int n = static_cast<int>(terms.front().amplitude.size());
    Vec out = Vec::Zero(n);
    for (const auto& term : terms) {
        const int d = static_cast<int>(xi.size());
        const double s2 = term.sigma * term.sigma;
        double scale = std::pow(2.0 * pi, 0.5 * d) * std::pow(term.sigma, d) *
                       std::exp(-0.5 * s2 * xi.squaredNorm());
        cplx phase = std::exp(cplx(0.0, xi.dot(term.center)));
        cplx factor = cplx(0.0, term.center[axis]) - cplx(s2 * xi[axis], 0.0);
        out += (scale * phase * factor) * term.amplitude.cast<cplx>();
    }
    return out;
}

RVec CouplingSpec::real_space(const RVec& x) const {
    if (terms.empty()) return RVec();
    const int n = static_cast<int>(terms.front().amplitude.size());
    RVec out = RVec::Zero(n);
    for (const auto& term : terms) {
        double q = (x - term.center).squaredNorm() / (2.0 * term.sigma * term.sigma);
        out += std::exp(-q) * term.amplitude;
    }
    return out;
}

double CouplingSpec::tail_radius() const {
    double r = 0.0;
    for (const auto& term : terms)
        r = std::max(r, 8.0 * term.sigma + 8.0 + term.center.lpNorm<Eigen::Infinity>());
    return r;
}

void CouplingSpec::validate(int d, int n, std::vector<std::string>& errors) const {
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        if (t.sigma <= 0.0)
            errors.push_back("coupling term " + std::to_string(i) + ": sigma must be > 0");
        if (t.amplitude.size() != n)
            errors.push_back("coupling term " + std::to_string(i) + ": amplitude must have n = " +
                             std::to_string(n) + " components");
        if (t.center.size() != d)
            errors.push_back("coupling term " + std::to_string(i) + ": center must have d = " +
                             std::to_string(d) + " components");
    }
}

int ModelParams::field_dim() const {
    int p = 1;
    for (int a = 0; a < d; ++a) p *= modes_per_axis();
    return p;
}

int ModelParams::cells() const {
    int c = 1;
    for (int a = 0; a < d; ++a) c *= N;
    return c;
}

IVec ModelParams::mode_from_index(int idx) const {
    const int P = modes_per_axis();
    IVec m(d);
    for (int a = d - 1; a >= 0; --a) {
        m[a] = idx % P - K;
        idx /= P;
    }
    return m;
}

int ModelParams::mode_index(const IVec& m) const {
    const int P = modes_per_axis();
    int idx = 0;
    for (int a = 0; a < d; ++a) idx = idx * P + (m[a] + K);
    return idx;
}

IVec ModelParams::grid_coords(int j) const {
    IVec c(d);
    for (int a = d - 1; a >= 0; --a) {
        c[a] = j % N;
        j /= N;
    }
    return c;
}

int ModelParams::grid_index(const IVec& coords) const {
    int j = 0;
    for (int a = 0; a < d; ++a) {
        int c = coords[a] % N;
        if (c < 0) c += N;
        j = j * N + c;
    }
    return j;
}

RVec ModelParams::theta_of_grid_index(int j) const {
    IVec c = grid_coords(j);
    RVec theta(d);
    for (int a = 0; a < d; ++a) theta[a] = 2.0 * pi * c[a] / N;
    return theta;
}

RVec ModelParams::theta_hat_of_grid_index(int j) const { return wrap_to_pi(theta_of_grid_index(j)); }

std::vector<std::string> ModelParams::validation_errors() const {
    std::vector<std::string> errors;
    if (d != 1 && d != 2) errors.push_back("d: only d = 1 or d = 2 is supported");
    if (n < 1) errors.push_back("n: need at least one lattice component");
    if (!(m0 > 0.0)) errors.push_back("m0: field mass must be > 0");
    if (!(nu0 > 0.0)) errors.push_back("nu0: pinning frequency must be > 0");
    if (K < 0) errors.push_back("K: plane-wave cutoff must be >= 0");
    if (N < 2) errors.push_back("N: need at least two cells per axis");
    if (N % 2 != 0) errors.push_back("N: must be even so the theta grid contains 0 and pi");
    coupling.validate(d, n, errors);
    return errors;
}

void ModelParams::validate() const {
    auto errors = validation_errors();
    if (errors.empty()) return;
    std::ostringstream msg;
    msg << "invalid model parameters:";
    for (const auto& e : errors) msg << "\n  - " << e;
    throw ConfigError(msg.str());
}

}  // namespace latfield
