#include "latfield/bloch_cell.hpp"

#include <cmath>
#include <limits>

namespace latfield {

namespace {

// The collocation lattice identifies the frequency (2K+1)*pi with its
// negative (reached only at theta_hat = pi with the boundary mode). Taking
// the real part of Rhat exactly there keeps the truncated generator on the
// reality subspace; it is a no-op for centered couplings.
bool self_conjugate_frequency(const RVec& xi, int P) {
    const double nyquist = P * pi;
    for (int a = 0; a < xi.size(); ++a) {
        double v = std::abs(xi[a]);
        if (!(v < 1e-9 || std::abs(v - nyquist) < 1e-9 * P)) return false;
    }
    return true;
}

}  // namespace

Mat coupling_coefficients(const ModelParams& model, const RVec& theta) {
    const int F = model.field_dim();
    Mat c = Mat::Zero(F, model.n);
    if (model.coupling.is_zero()) return c;
    const RVec that = wrap_to_pi(theta);
    for (int idx = 0; idx < F; ++idx) {
        IVec m = model.mode_from_index(idx);
        RVec xi = that + 2.0 * pi * m.cast<double>();
        c.row(idx) = model.coupling.fourier(xi).transpose();
    }
    return c;
}

double omega_star_sq(const ModelParams& model, const RVec& theta) {
    double w = model.nu0 * model.nu0;
    for (int a = 0; a < model.d; ++a) w += 2.0 * (1.0 - std::cos(theta[a]));
    return w;
}

Mat build_h_theta(const ModelParams& model, const RVec& theta) {
    if (theta.size() != model.d) throw DimensionMismatch("theta must have d components");
    const int F = model.field_dim();
    const int M = model.cell_dim();
    const RVec that = wrap_to_pi(theta);
    const int P = model.modes_per_axis();

    Mat h = Mat::Zero(M, M);
    for (int idx = 0; idx < F; ++idx) {
        IVec m = model.mode_from_index(idx);
        RVec xi = that + 2.0 * pi * m.cast<double>();
        h(idx, idx) = xi.squaredNorm() + model.m0 * model.m0;
    }
    const double wsq = omega_star_sq(model, that);
    for (int j = 0; j < model.n; ++j) h(F + j, F + j) = wsq;

    if (!model.coupling.is_zero()) {
        for (int idx = 0; idx < F; ++idx) {
            IVec m = model.mode_from_index(idx);
            RVec xi = that + 2.0 * pi * m.cast<double>();
            Vec c = model.coupling.fourier(xi);
            if (self_conjugate_frequency(xi, P)) c = c.real().cast<cplx>();
            for (int j = 0; j < model.n; ++j) {
                h(idx, F + j) = c[j];
                h(F + j, idx) = std::conj(c[j]);
            }
        }
    }
    return h;
}

Mat dh_dtheta(const ModelParams& model, const RVec& theta, int axis) {
    const int F = model.field_dim();
    const int M = model.cell_dim();
    const RVec that = wrap_to_pi(theta);
    const int P = model.modes_per_axis();

    Mat dh = Mat::Zero(M, M);
    for (int idx = 0; idx < F; ++idx) {
        IVec m = model.mode_from_index(idx);
        RVec xi = that + 2.0 * pi * m.cast<double>();
        dh(idx, idx) = 2.0 * xi[axis];
    }
    const double ds = 2.0 * std::sin(that[axis]);
    for (int j = 0; j < model.n; ++j) dh(F + j, F + j) = ds;

    if (!model.coupling.is_zero()) {
        for (int idx = 0; idx < F; ++idx) {
            IVec m = model.mode_from_index(idx);
            RVec xi = that + 2.0 * pi * m.cast<double>();
            Vec g = model.coupling.fourier_grad(xi, axis);
            if (self_conjugate_frequency(xi, P)) g = g.real().cast<cplx>();
            for (int j = 0; j < model.n; ++j) {
                dh(idx, F + j) = g[j];
                dh(F + j, idx) = std::conj(g[j]);
            }
        }
    }
    return dh;
}

double default_gap_tol(const RVec& lambda) {
    return 1e-8 * (1.0 + lambda[lambda.size() - 1]);
}

int SpectralData::group_of(int l) const {
    for (std::size_t g = 0; g < groups.size(); ++g)
        if (l >= groups[g].first && l < groups[g].second) return static_cast<int>(g);
    return -1;
}

double SpectralData::min_band_gap() const {
    double gap = std::numeric_limits<double>::infinity();
    for (int l = 0; l + 1 < omega.size(); ++l) gap = std::min(gap, omega[l + 1] - omega[l]);
    return gap;
}

SpectralData spectral_decompose(const Mat& h, double gap_tol) {
    SpectralData s;
    s.h = h;
    Eigen::SelfAdjointEigenSolver<Mat> solver(h);
    if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed");
    s.lambda = solver.eigenvalues();
    s.vecs = solver.eigenvectors();
    if (s.lambda[0] <= 0.0) throw NonPositiveSpectrum(s.lambda[0]);
    s.omega = s.lambda.array().sqrt();
    s.gap_tol = gap_tol >= 0.0 ? gap_tol : default_gap_tol(s.lambda);
    int begin = 0;
    for (int l = 1; l <= s.lambda.size(); ++l) {
        if (l == s.lambda.size() || s.lambda[l] - s.lambda[l - 1] >= s.gap_tol) {
            s.groups.emplace_back(begin, l);
            begin = l;
        }
    }
    return s;
}

SpectralData cell_spectrum(const ModelParams& model, const RVec& theta, double gap_tol) {
    SpectralData s = spectral_decompose(build_h_theta(model, theta), gap_tol);
    s.theta = theta;
    return s;
}

Mat matrix_function(const SpectralData& spec, const std::function<double(double)>& f) {
    RVec fw(spec.omega.size());
    for (int l = 0; l < spec.omega.size(); ++l) {
        fw[l] = f(spec.omega[l]);
        if (!std::isfinite(fw[l])) throw SingularFunction(spec.omega[l]);
    }
    return spec.vecs * fw.asDiagonal() * spec.vecs.adjoint();
}

R2Report check_r2(const ModelParams& model, const std::vector<RVec>& theta_grid) {
    R2Report report;
    report.kappa_sq = std::numeric_limits<double>::infinity();
    for (const auto& theta : theta_grid) {
        Eigen::SelfAdjointEigenSolver<Mat> solver(build_h_theta(model, theta));
        double l1 = solver.eigenvalues()[0];
        if (l1 < report.kappa_sq) {
            report.kappa_sq = l1;
            report.worst_theta = theta;
        }
    }
    report.pass = report.kappa_sq > 0.0;
    return report;
}

R2PrimeReport check_r2_prime(const ModelParams& model, int points_per_axis) {
    R2PrimeReport report;
    report.rhs = 0.5 * model.nu0 * model.nu0 * model.m0 * model.m0;
    if (!model.coupling.is_zero()) {
        const int kmax = static_cast<int>(std::ceil(model.coupling.tail_radius()));
        const int Q = points_per_axis;
        // Periodized integrand, so the uniform cell rule is spectrally accurate.
        double sum = 0.0;
        const int cells = model.d == 1 ? Q : Q * Q;
        for (int q = 0; q < cells; ++q) {
            RVec y(model.d);
            if (model.d == 1) {
                y[0] = (q + 0.5) / Q;
            } else {
                y[0] = (q / Q + 0.5) / Q;
                y[1] = (q % Q + 0.5) / Q;
            }
            RVec acc = RVec::Zero(model.n);
            if (model.d == 1) {
                RVec x(1);
                for (int k = -kmax; k <= kmax; ++k) {
                    x[0] = k + y[0];
                    acc += model.coupling.real_space(x);
                }
            } else {
                RVec x(2);
                for (int k1 = -kmax; k1 <= kmax; ++k1)
                    for (int k2 = -kmax; k2 <= kmax; ++k2) {
                        x[0] = k1 + y[0];
                        x[1] = k2 + y[1];
                        acc += model.coupling.real_space(x);
                    }
            }
            sum += acc.squaredNorm();
        }
        report.lhs = sum / cells;
    }
    report.margin = report.rhs - report.lhs;
    report.pass = report.lhs < report.rhs;
    return report;
}

std::vector<RVec> uniform_theta_grid(int d, int per_axis) {
    std::vector<RVec> grid;
    if (d == 1) {
        grid.reserve(per_axis);
        for (int i = 0; i < per_axis; ++i) {
            RVec t(1);
            t[0] = 2.0 * pi * i / per_axis;
            grid.push_back(t);
        }
    } else {
        grid.reserve(static_cast<std::size_t>(per_axis) * per_axis);
        for (int i = 0; i < per_axis; ++i)
            for (int j = 0; j < per_axis; ++j) {
                RVec t(2);
                t[0] = 2.0 * pi * i / per_axis;
                t[1] = 2.0 * pi * j / per_axis;
                grid.push_back(t);
            }
    }
    return grid;
}

}  // namespace latfield
