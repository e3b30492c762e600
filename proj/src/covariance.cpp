#include "latfield/covariance.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "latfield/parallel.hpp"
#include "latfield/propagator.hpp"

namespace latfield {

namespace {

bool is_field_channel(int which) { return which == 0 || which == 2; }  // psi, pi

}  // namespace

void InitialMeasureSpec::validate(const ModelParams& model) const {
    if (kind == Kind::MovingAverage) {
        const MAChannel* ch[4] = {&ma_psi, &ma_u, &ma_pi, &ma_v};
        for (int i = 0; i < 4; ++i) {
            if (ch[i]->kernel.range < 0 || 2 * ch[i]->kernel.range >= model.N)
                throw ConfigError("moving-average kernel range must satisfy 0 <= range < N/2");
            if (ch[i]->kernel.shape == KernelSpec::Shape::Gaussian && ch[i]->kernel.sigma <= 0.0)
                throw ConfigError("moving-average kernel sigma must be > 0");
            for (int k = 0; k < 4; ++k)
                if (ch[i]->stream == ch[k]->stream && is_field_channel(i) != is_field_channel(k))
                    throw ConfigError(
                        "a noise stream cannot be shared between field and lattice channels");
        }
    }
    if (kind == Kind::Direct) {
        if (static_cast<int>(direct.size()) != model.cells())
            throw ConfigError("direct covariance table must have one matrix per grid point");
        for (const auto& q : direct) {
            if (q.rows() != 2 * model.cell_dim() || q.cols() != q.rows())
                throw ConfigError("direct covariance blocks must be 2m x 2m");
            double lmin = min_eigenvalue(q);
            if (lmin < -1e-10 * (1.0 + q.cwiseAbs().maxCoeff())) throw NotPSD(lmin);
        }
    }
}

cplx field_kernel_transform(const KernelSpec& kernel, const ModelParams& model, const RVec& xi) {
    const int P = model.modes_per_axis();
    const double inv_pd = 1.0 / model.collocation_points();
    if (kernel.shape == KernelSpec::Shape::Delta) return kernel.amplitude * inv_pd;
    cplx acc = 0.0;
    // Sum over the truncated support sampled at cell + offset/P; this is the
    // same array the sampler convolves with, so law and formula agree exactly.
    if (model.d == 1) {
        for (int k = -kernel.range; k <= kernel.range; ++k)
            for (int p = 0; p < P; ++p) {
                double x = k + static_cast<double>(p) / P;
                double val = kernel.amplitude * std::exp(-0.5 * x * x / (kernel.sigma * kernel.sigma));
                acc += val * std::exp(cplx(0.0, xi[0] * x));
            }
    } else {
        for (int k1 = -kernel.range; k1 <= kernel.range; ++k1)
            for (int k2 = -kernel.range; k2 <= kernel.range; ++k2)
                for (int p1 = 0; p1 < P; ++p1)
                    for (int p2 = 0; p2 < P; ++p2) {
                        double x1 = k1 + static_cast<double>(p1) / P;
                        double x2 = k2 + static_cast<double>(p2) / P;
                        double r2 = x1 * x1 + x2 * x2;
                        double val =
                            kernel.amplitude * std::exp(-0.5 * r2 / (kernel.sigma * kernel.sigma));
                        acc += val * std::exp(cplx(0.0, xi[0] * x1 + xi[1] * x2));
                    }
    }
    return acc * inv_pd;
}

cplx lattice_kernel_transform(const KernelSpec& kernel, const ModelParams& model,
                              const RVec& theta) {
    if (kernel.shape == KernelSpec::Shape::Delta) return kernel.amplitude;
    cplx acc = 0.0;
    if (model.d == 1) {
        for (int k = -kernel.range; k <= kernel.range; ++k)
            acc += kernel.amplitude * std::exp(-0.5 * k * k / (kernel.sigma * kernel.sigma)) *
                   std::exp(cplx(0.0, theta[0] * k));
    } else {
        for (int k1 = -kernel.range; k1 <= kernel.range; ++k1)
            for (int k2 = -kernel.range; k2 <= kernel.range; ++k2) {
                double r2 = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
                acc += kernel.amplitude * std::exp(-0.5 * r2 / (kernel.sigma * kernel.sigma)) *
                       std::exp(cplx(0.0, theta[0] * k1 + theta[1] * k2));
            }
    }
    return acc;
}

Mat initial_covariance(const InitialMeasureSpec& spec, const GridSpectra& gs, int grid_index) {
    const ModelParams& model = gs.model;
    const int m = model.cell_dim();
    const int F = model.field_dim();
    const SpectralData& s = gs.spec[grid_index];

    if (spec.kind == InitialMeasureSpec::Kind::Gibbs) {
        Mat q = Mat::Zero(2 * m, 2 * m);
        RVec inv_lambda = s.lambda.cwiseInverse();
        q.topLeftCorner(m, m) = spec.temperature * (s.vecs * inv_lambda.asDiagonal() * s.vecs.adjoint());
        q.bottomRightCorner(m, m) = spec.temperature * Mat::Identity(m, m);
        return q;
    }
    if (spec.kind == InitialMeasureSpec::Kind::Direct) {
        return spec.direct[grid_index];
    }

    // Moving average: q = sum_streams B B^dagger with one column block per
    // independent scalar noise component.
    RVec theta = model.theta_of_grid_index(grid_index);
    RVec that = wrap_to_pi(theta);

    auto field_column = [&](const MAChannel& ch, int slot) {
        Vec col = Vec::Zero(2 * m);
        for (int r = 0; r < F; ++r) {
            RVec xi = that + 2.0 * pi * model.mode_from_index(r).cast<double>();
            col[slot * m + r] = field_kernel_transform(ch.kernel, model, xi);
        }
        return col;
    };
    auto lattice_columns = [&](const MAChannel& ch, int slot) {
        std::vector<Vec> out;
        cplx k = lattice_kernel_transform(ch.kernel, model, theta);
        for (int c = 0; c < model.n; ++c) {
            Vec col = Vec::Zero(2 * m);
            col[slot * m + F + c] = k;
            out.push_back(col);
        }
        return out;
    };

    // Merge columns that share a stream (and hence the same noise).
    std::vector<std::pair<std::pair<int, int>, Vec>> merged;
    auto add = [&](int stream, const Vec& col, int component) {
        for (auto& mc : merged)
            if (mc.first == std::make_pair(stream, component)) {
                mc.second += col;
                return;
            }
        merged.emplace_back(std::make_pair(stream, component), col);
    };
    add(spec.ma_psi.stream, field_column(spec.ma_psi, 0), 0);
    add(spec.ma_pi.stream, field_column(spec.ma_pi, 1), 0);
    {
        auto uc = lattice_columns(spec.ma_u, 0);
        auto vc = lattice_columns(spec.ma_v, 1);
        for (int c = 0; c < model.n; ++c) {
            add(spec.ma_u.stream, uc[c], 1 + c);
            add(spec.ma_v.stream, vc[c], 1 + c);
        }
    }

    Mat q = Mat::Zero(2 * m, 2 * m);
    for (const auto& mc : merged) q += mc.second * mc.second.adjoint();
    return q;
}

CovarianceTable initial_covariance_table(const InitialMeasureSpec& spec, const GridSpectra& gs,
                                         int threads) {
    spec.validate(gs.model);
    CovarianceTable table;
    table.q.resize(gs.grid_size());
    parallel_for(gs.grid_size(), [&](std::size_t j) {
        table.q[j] = initial_covariance(spec, gs, static_cast<int>(j));
    }, threads);
    return table;
}

Mat evolve_covariance(const Mat& q0, const SpectralData& spec, double t) {
    Mat g = propagator_matrix(spec, t);
    return g * q0 * g.adjoint();
}

Mat limit_covariance(const Mat& q0, const SpectralData& spec) {
    const int m = spec.dim();
    Mat q00 = q0.topLeftCorner(m, m);
    Mat q01 = q0.topRightCorner(m, m);
    Mat q10 = q0.bottomLeftCorner(m, m);
    Mat q11 = q0.bottomRightCorner(m, m);
    RVec inv_lambda = spec.lambda.cwiseInverse();
    Mat hinv = spec.vecs * inv_lambda.asDiagonal() * spec.vecs.adjoint();

    Mat blocks[2][2];
    blocks[0][0] = 0.5 * (q00 + hinv * q11);
    blocks[0][1] = 0.5 * (q01 - q10);
    blocks[1][0] = 0.5 * (q10 - q01);
    blocks[1][1] = 0.5 * (spec.h * q00 + q11);

    // Projector-group sandwich, done entrywise in the eigenbasis: keep only
    // coefficients whose band indices lie in the same degeneracy group.
    Mat out(2 * m, 2 * m);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            Mat b = spec.vecs.adjoint() * blocks[i][k] * spec.vecs;
            for (int l = 0; l < m; ++l)
                for (int lp = 0; lp < m; ++lp)
                    if (spec.group_of(l) != spec.group_of(lp)) b(l, lp) = 0.0;
            out.block(i * m, k * m, m, m) = spec.vecs * b * spec.vecs.adjoint();
        }
    return out;
}

CovarianceTable evolve_covariance_table(const CovarianceTable& table, const GridSpectra& gs,
                                        double t, int threads) {
    if (table.grid_size() != gs.grid_size())
        throw GridMismatch("covariance table does not match the spectra grid");
    CovarianceTable out;
    out.q.resize(table.grid_size());
    parallel_for(table.grid_size(), [&](std::size_t j) {
        out.q[j] = evolve_covariance(table.q[j], gs.spec[j], t);
    }, threads);
    return out;
}

CovarianceTable limit_covariance_table(const CovarianceTable& table, const GridSpectra& gs,
                                       int threads) {
    if (table.grid_size() != gs.grid_size())
        throw GridMismatch("covariance table does not match the spectra grid");
    CovarianceTable out;
    out.q.resize(table.grid_size());
    parallel_for(table.grid_size(), [&](std::size_t j) {
        out.q[j] = limit_covariance(table.q[j], gs.spec[j]);
    }, threads);
    return out;
}

double quadratic_form(const CovarianceTable& table, const ZakField& z) {
    if (table.grid_size() != z.grid_size())
        throw GridMismatch("covariance table and dual field use different grids");
    const int m = static_cast<int>(z.y0.rows());
    cplx acc = 0.0;
    Vec stacked(2 * m);
    for (int j = 0; j < z.grid_size(); ++j) {
        stacked.head(m) = z.y0.col(j);
        stacked.tail(m) = z.y1.col(j);
        acc += stacked.dot(table.q[j] * stacked);
    }
    double value = acc.real() / z.grid_size();
    if (value < -1e-10 * (1.0 + std::abs(value)))
        throw NotPSD(value);
    return value;
}

SpectralCoeffs spectral_coeffs(const Mat& q0, const SpectralData& spec) {
    const int m = spec.dim();
    SpectralCoeffs c;
    c.p00 = spec.vecs.adjoint() * q0.topLeftCorner(m, m) * spec.vecs;
    c.p01 = spec.vecs.adjoint() * q0.topRightCorner(m, m) * spec.vecs;
    c.p10 = spec.vecs.adjoint() * q0.bottomLeftCorner(m, m) * spec.vecs;
    c.p11 = spec.vecs.adjoint() * q0.bottomRightCorner(m, m) * spec.vecs;
    return c;
}

Eigen::Matrix2cd r_matrix(const Eigen::Matrix2cd& p, double omega_l, double omega_lp, double t) {
    Eigen::Matrix2cd cl, clpT;
    cl << 0.0, 1.0 / omega_l, -omega_l, 0.0;
    clpT << 0.0, -omega_lp, 1.0 / omega_lp, 0.0;
    Eigen::Matrix2cd sandwich = cl * p * clpT;
    Eigen::Matrix2cd left = cl * p;
    Eigen::Matrix2cd right = p * clpT;
    Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
    // plus branch
    r += 0.5 * (std::cos((omega_l + omega_lp) * t) * (p - sandwich) +
                std::sin((omega_l + omega_lp) * t) * (left + right));
    // minus branch
    r += 0.5 * (std::cos((omega_l - omega_lp) * t) * (p + sandwich) +
                std::sin((omega_l - omega_lp) * t) * (left - right));
    return r;
}

Mat assemble_from_r(const SpectralCoeffs& coeffs, const SpectralData& spec, double t) {
    const int m = spec.dim();
    Mat r00(m, m), r01(m, m), r10(m, m), r11(m, m);
    for (int l = 0; l < m; ++l)
        for (int lp = 0; lp < m; ++lp) {
            Eigen::Matrix2cd r = r_matrix(coeffs.block(l, lp), spec.omega[l], spec.omega[lp], t);
            r00(l, lp) = r(0, 0);
            r01(l, lp) = r(0, 1);
            r10(l, lp) = r(1, 0);
            r11(l, lp) = r(1, 1);
        }
    Mat out(2 * m, 2 * m);
    out.topLeftCorner(m, m) = spec.vecs * r00 * spec.vecs.adjoint();
    out.topRightCorner(m, m) = spec.vecs * r01 * spec.vecs.adjoint();
    out.bottomLeftCorner(m, m) = spec.vecs * r10 * spec.vecs.adjoint();
    out.bottomRightCorner(m, m) = spec.vecs * r11 * spec.vecs.adjoint();
    return out;
}

double trace_diagnostic(const Mat& q, const SpectralData& spec) {
    const int m = spec.dim();
    cplx t = (spec.h * q.topLeftCorner(m, m)).trace() + q.bottomRightCorner(m, m).trace();
    return t.real();
}

double min_eigenvalue(const Mat& hermitian) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(hermitian, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()[0];
}

Mat psd_sqrt(const Mat& q) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(q);
    RVec lambda = solver.eigenvalues();
    double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    if (lambda[0] < -1e-10 * scale) throw NotPSD(lambda[0]);
    RVec root = lambda.cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * root.asDiagonal();
}

void write_covariance_csv(const CovarianceTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out << std::setprecision(17);
    out << "theta_index,i,j,row,col,re,im\n";
    for (int g = 0; g < table.grid_size(); ++g) {
        const Mat& q = table.q[g];
        const int m = static_cast<int>(q.rows()) / 2;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int r = 0; r < m; ++r)
                    for (int c = 0; c < m; ++c) {
                        cplx v = q(i * m + r, j * m + c);
                        out << g << "," << i << "," << j << "," << r << "," << c << ","
                            << v.real() << "," << v.imag() << "\n";
                    }
    }
}

}  // namespace latfield
