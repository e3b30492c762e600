#include "latfield/dispersion.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "latfield/parallel.hpp"

namespace latfield {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

RVec eigen_omegas(const ModelParams& model, const RVec& theta) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(build_h_theta(model, theta),
                                              Eigen::EigenvaluesOnly);
    return solver.eigenvalues().array().max(0.0).sqrt();
}

// Smallest separation of band l from its neighbors in a sorted spectrum.
double band_gap(const RVec& omega, int l) {
    double gap = std::numeric_limits<double>::infinity();
    if (l > 0) gap = std::min(gap, omega[l] - omega[l - 1]);
    if (l + 1 < omega.size()) gap = std::min(gap, omega[l + 1] - omega[l]);
    return gap;
}

// The top Galerkin band kinks at theta_hat = +-pi because its crossing
// partner is outside the mode window; treat it like a crossing there.
bool top_band_junction(const ModelParams& model, const RVec& theta, int l, double reach) {
    if (l != model.cell_dim() - 1) return false;
    RVec that = wrap_to_pi(theta);
    for (int a = 0; a < model.d; ++a)
        if (pi - std::abs(that[a]) < reach) return true;
    return false;
}

struct StencilOmegas {
    // omega at theta + s*e_a for s in {+-h, +-h/2}, plus center; and the
    // diagonal points needed for mixed second differences when d = 2.
    RVec center;
    std::vector<std::array<RVec, 4>> axis;          // per axis: +h, -h, +h/2, -h/2
    std::vector<std::array<RVec, 8>> mixed;         // per axis pair, two step sizes
};

StencilOmegas eval_stencil(const ModelParams& model, const RVec& theta, double h) {
    StencilOmegas st;
    st.center = eigen_omegas(model, theta);
    st.axis.resize(model.d);
    for (int a = 0; a < model.d; ++a) {
        const double steps[4] = {h, -h, 0.5 * h, -0.5 * h};
        for (int s = 0; s < 4; ++s) {
            RVec t = theta;
            t[a] += steps[s];
            st.axis[a][s] = eigen_omegas(model, t);
        }
    }
    if (model.d == 2) {
        st.mixed.resize(1);
        int s = 0;
        for (double step : {h, 0.5 * h}) {
            for (int s1 : {1, -1})
                for (int s2 : {1, -1}) {
                    RVec t = theta;
                    t[0] += s1 * step;
                    t[1] += s2 * step;
                    st.mixed[0][s++] = eigen_omegas(model, t);
                }
        }
    }
    return st;
}

bool stencil_separated(const StencilOmegas& st, int l, double min_gap) {
    if (band_gap(st.center, l) < min_gap) return false;
    for (const auto& ax : st.axis)
        for (const auto& w : ax)
            if (band_gap(w, l) < min_gap) return false;
    for (const auto& mx : st.mixed)
        for (const auto& w : mx)
            if (band_gap(w, l) < min_gap) return false;
    return true;
}

// Hessian entries by central second differences at steps h and h/2,
// Richardson-combined entrywise, then the determinant.
double stencil_hessian_det(const StencilOmegas& st, int l, double h, int d) {
    auto second_diff = [&](int a, double step, int offset) {
        return (st.axis[a][offset][l] - 2.0 * st.center[l] + st.axis[a][offset + 1][l]) /
               (step * step);
    };
    RMat hess(d, d);
    for (int a = 0; a < d; ++a) {
        double dh = second_diff(a, h, 0);
        double dh2 = second_diff(a, 0.5 * h, 2);
        hess(a, a) = (4.0 * dh2 - dh) / 3.0;
    }
    if (d == 2) {
        auto mixed = [&](double step, int base) {
            const auto& m = st.mixed[0];
            return (m[base][l] - m[base + 1][l] - m[base + 2][l] + m[base + 3][l]) /
                   (4.0 * step * step);
        };
        double mh = mixed(h, 0);
        double mh2 = mixed(0.5 * h, 4);
        hess(0, 1) = hess(1, 0) = (4.0 * mh2 - mh) / 3.0;
    }
    return d == 1 ? hess(0, 0) : hess.determinant();
}

}  // namespace

Bands band_structure(const ModelParams& model, const std::vector<RVec>& grid,
                     const BandOptions& opts) {
    const int G = static_cast<int>(grid.size());
    const int M = model.cell_dim();
    Bands bands;
    bands.d = model.d;
    bands.m = M;
    bands.thetas = grid;
    bands.omegas.resize(G, M);
    bands.gaps.resize(G);
    bands.hessian_dets = RMat::Constant(G, M, kNaN);
    bands.velocities.assign(G, RMat::Constant(M, model.d, kNaN));
    bands.flagged.assign(G, std::vector<char>(M, 0));

    parallel_for(G, [&](std::size_t g) {
        const RVec& theta = grid[g];
        SpectralData spec = cell_spectrum(model, theta, opts.gap_tol);
        bands.omegas.row(g) = spec.omega.transpose();
        bands.gaps[g] = spec.min_band_gap();
        if (!opts.derivatives) return;

        StencilOmegas st = eval_stencil(model, theta, opts.fd_step);
        const double min_gap = std::max(spec.gap_tol, opts.flag_factor * opts.fd_step);
        const double reach = 2.0 * opts.fd_step;
        for (int l = 0; l < M; ++l) {
            if (!stencil_separated(st, l, min_gap) ||
                top_band_junction(model, theta, l, reach)) {
                bands.flagged[g][l] = 1;
                continue;
            }
            for (int a = 0; a < model.d; ++a) {
                double hf = (spec.vecs.col(l).adjoint() * dh_dtheta(model, theta, a) *
                             spec.vecs.col(l))(0, 0).real();
                bands.velocities[g](l, a) = hf / (2.0 * spec.omega[l]);
            }
            bands.hessian_dets(g, l) = stencil_hessian_det(st, l, opts.fd_step, model.d);
        }
    }, opts.threads);
    return bands;
}

RVec group_velocity(const ModelParams& model, const RVec& theta, int l, double gap_tol) {
    SpectralData spec = cell_spectrum(model, theta, gap_tol);
    if (band_gap(spec.omega, l) < spec.gap_tol) throw DegenerateBand(theta[0], l);
    RVec v(model.d);
    for (int a = 0; a < model.d; ++a) {
        double hf = (spec.vecs.col(l).adjoint() * dh_dtheta(model, theta, a) *
                     spec.vecs.col(l))(0, 0).real();
        v[a] = hf / (2.0 * spec.omega[l]);
    }
    return v;
}

double hessian_det(const ModelParams& model, const RVec& theta, int l, double fd_step,
                   double gap_tol) {
    SpectralData spec = cell_spectrum(model, theta, gap_tol);
    StencilOmegas st = eval_stencil(model, theta, fd_step);
    if (!stencil_separated(st, l, std::max(spec.gap_tol, 100.0 * fd_step)) ||
        top_band_junction(model, theta, l, 2.0 * fd_step))
        throw DegenerateBand(theta[0], l);
    return stencil_hessian_det(st, l, fd_step, model.d);
}

E1E2Report check_e1_e2(const Bands& bands, const E1E2Options& opts) {
    const int G = bands.size();
    const int M = bands.m;
    E1E2Report report;
    report.small_hessian_fraction.assign(M, 0.0);
    report.e1_pass = true;
    for (int l = 0; l < M; ++l) {
        // The verdict looks for zero sets of D_l, so "small" is relative to
        // the band's own curvature scale: high bands are nearly linear and
        // carry a uniformly small but nonvanishing Hessian.
        double scale = 0.0;
        for (int g = 0; g < G; ++g)
            if (!bands.flagged[g][l]) scale = std::max(scale, std::abs(bands.hessian_dets(g, l)));
        int valid = 0, small = 0;
        for (int g = 0; g < G; ++g) {
            if (bands.flagged[g][l]) continue;
            ++valid;
            if (std::abs(bands.hessian_dets(g, l)) < opts.hessian_tol * scale) ++small;
        }
        double frac = valid ? static_cast<double>(small) / valid : 1.0;
        report.small_hessian_fraction[l] = frac;
        if (frac >= opts.small_fraction) report.e1_pass = false;
    }

    report.min_pair_variance = std::numeric_limits<double>::infinity();
    report.e2_pass = true;
    auto variance = [&](const RVec& x) {
        double mean = x.mean();
        return (x.array() - mean).square().mean();
    };
    for (int l = 0; l < M; ++l) {
        // The diagonal sum 2 omega_l is a live oscillation frequency: a flat
        // band must fail the verdict even when no distinct partner exists.
        for (int lp = l; lp < M; ++lp) {
            RVec diff = bands.omegas.col(l) - bands.omegas.col(lp);
            RVec sum = bands.omegas.col(l) + bands.omegas.col(lp);
            bool identical = l == lp || diff.array().abs().maxCoeff() < opts.identical_tol;
            double vsum = variance(sum);
            double vdiff = variance(diff);
            double pair_min = identical ? vsum : std::min(vsum, vdiff);
            if (pair_min < report.min_pair_variance) {
                report.min_pair_variance = pair_min;
                report.worst_pair_l = l;
                report.worst_pair_lp = lp;
            }
            if (pair_min <= opts.variance_tol) report.e2_pass = false;
        }
    }
    return report;
}

GroupSpeed max_group_speed(const Bands& bands) {
    GroupSpeed speed;
    for (int g = 0; g < bands.size(); ++g)
        for (int l = 0; l < bands.m; ++l) {
            if (bands.flagged[g][l]) continue;
            double v = bands.velocities[g].row(l).norm();
            if (std::isfinite(v)) speed.gamma_hat = std::max(speed.gamma_hat, v);
        }
    speed.gamma_safe = 1.1 * speed.gamma_hat;
    return speed;
}

std::vector<CouplingScanRow> scan_coupling(const ModelParams& base,
                                           const std::vector<CouplingSpec>& components,
                                           const std::vector<RVec>& amplitude_vectors,
                                           const std::vector<RVec>& grid,
                                           const BandOptions& opts,
                                           const E1E2Options& verdict_opts) {
    std::vector<CouplingScanRow> rows;
    for (const auto& c : amplitude_vectors) {
        CouplingScanRow row;
        row.amplitudes = c;
        ModelParams model = base;
        model.coupling.terms.clear();
        for (int s = 0; s < c.size(); ++s) {
            for (auto term : components[s].terms) {
                term.amplitude *= c[s];
                model.coupling.terms.push_back(term);
            }
        }
        R2PrimeReport gate = check_r2_prime(model);
        row.r2prime_lhs = gate.lhs;
        if (!gate.pass) {
            row.skipped = true;
            rows.push_back(row);
            continue;
        }
        Bands bands = band_structure(model, grid, opts);
        E1E2Report verdict = check_e1_e2(bands, verdict_opts);
        row.e1_pass = verdict.e1_pass;
        row.e2_pass = verdict.e2_pass;
        row.min_pair_variance = verdict.min_pair_variance;
        for (double f : verdict.small_hessian_fraction)
            row.max_small_fraction = std::max(row.max_small_fraction, f);
        rows.push_back(row);
    }
    return rows;
}

void write_bands_csv(const Bands& bands, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out << std::setprecision(17);
    for (int a = 0; a < bands.d; ++a) out << "theta" << a << ",";
    out << "band_index,omega,";
    for (int a = 0; a < bands.d; ++a) out << "velocity" << a << ",";
    out << "hessian_det,gap\n";
    for (int g = 0; g < bands.size(); ++g) {
        for (int l = 0; l < bands.m; ++l) {
            for (int a = 0; a < bands.d; ++a) out << bands.thetas[g][a] << ",";
            out << l << "," << bands.omegas(g, l) << ",";
            for (int a = 0; a < bands.d; ++a) out << bands.velocities[g](l, a) << ",";
            out << bands.hessian_dets(g, l) << "," << bands.gaps[g] << "\n";
        }
    }
}

}  // namespace latfield
