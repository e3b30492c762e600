#include "latfield/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "latfield/dispersion.hpp"
#include "latfield/ensemble.hpp"
#include "latfield/parallel.hpp"

namespace latfield {

namespace {

// ---------------------------------------------------------------- helpers

double closed_form_band_error(const ModelParams& model, const Bands& bands) {
    // Decoupled bands are exactly the sorted union of the lattice branch and
    // the plane-wave branches of the mode window.
    double worst = 0.0;
    for (int g = 0; g < bands.size(); ++g) {
        RVec that = wrap_to_pi(bands.thetas[g]);
        std::vector<double> expected;
        expected.reserve(bands.m);
        double wsq = omega_star_sq(model, that);
        for (int c = 0; c < model.n; ++c) expected.push_back(std::sqrt(wsq));
        for (int idx = 0; idx < model.field_dim(); ++idx) {
            RVec xi = that + 2.0 * pi * model.mode_from_index(idx).cast<double>();
            expected.push_back(std::sqrt(xi.squaredNorm() + model.m0 * model.m0));
        }
        std::sort(expected.begin(), expected.end());
        for (int l = 0; l < bands.m; ++l)
            worst = std::max(worst,
                             std::abs(bands.omegas(g, l) - expected[l]) / expected[l]);
    }
    return worst;
}

double band_lipschitz_excess(const Bands& bands, double gamma_hat) {
    // Sorted bands along a 1-d sweep are Lipschitz with constant gamma_hat;
    // report the largest jump relative to the 2*gamma*dtheta allowance.
    if (bands.d != 1 || bands.size() < 2) return 0.0;
    double worst = 0.0;
    for (int g = 0; g + 1 < bands.size(); ++g) {
        double dtheta = std::abs(bands.thetas[g + 1][0] - bands.thetas[g][0]);
        if (dtheta <= 0.0) continue;
        double allowance = 2.0 * gamma_hat * dtheta + 1e-9;
        for (int l = 0; l < bands.m; ++l)
            worst = std::max(worst, std::abs(bands.omegas(g + 1, l) - bands.omegas(g, l)) /
                                        allowance);
    }
    return worst;
}

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
};

FitResult log_log_fit(const std::vector<double>& t, const std::vector<double>& y) {
    FitResult fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || !(y[i] > 0.0)) continue;
        double x = std::log(t[i]);
        double v = std::log(y[i]);
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
        ++n;
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

ModelParams random_small_model(RngStream& rng) {
    ModelParams model;
    model.d = 1;
    model.n = 1 + static_cast<int>(rng.next_u64() % 2);
    model.K = static_cast<int>(rng.next_u64() % 3);
    model.m0 = 0.6 + rng.uniform01();
    model.nu0 = 0.6 + rng.uniform01();
    model.N = 8 << (rng.next_u64() % 2);
    if (rng.uniform01() < 0.7) {
        CouplingTerm term;
        term.amplitude = RVec::Constant(model.n, 0.05 + 0.2 * rng.uniform01());
        term.sigma = 0.15 + 0.45 * rng.uniform01();
        term.center = RVec::Constant(1, rng.uniform01() < 0.5 ? 0.0 : 0.3 * rng.uniform01());
        model.coupling.terms.push_back(term);
    }
    return model;
}

LatticeState random_state(const ModelParams& model, RngStream& rng) {
    LatticeState s = LatticeState::zeros(model);
    for (int k = 0; k < model.cells(); ++k) {
        for (int p = 0; p < model.collocation_points(); ++p) {
            s.psi(p, k) = rng.normal();
            s.pi(p, k) = rng.normal();
        }
        for (int c = 0; c < model.n; ++c) {
            s.u(c, k) = rng.normal();
            s.v(c, k) = rng.normal();
        }
    }
    return s;
}

Mat random_psd(int dim, RngStream& rng) {
    Mat a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = cplx(rng.normal(), rng.normal());
    return a * a.adjoint() / dim;
}

// ------------------------------------------------------------ experiments

void run_bands(const ExperimentConfig& config, const std::string& dir, Summary& summary) {
    BandOptions opts;
    opts.threads = config.threads;
    Bands bands = band_structure(config.model, uniform_theta_grid(config.model.d,
                                                                  config.theta_points), opts);
    write_bands_csv(bands, dir + "/data_bands.csv");
    summary.add(assert_greater("spectrum-positive", "min omega over the sweep",
                               bands.omegas.minCoeff(), 0.0));
    double gamma = max_group_speed(bands).gamma_hat;
    summary.add(assert_less("band-lipschitz",
                            "max sorted-band jump relative to the 2*gamma*dtheta allowance",
                            band_lipschitz_excess(bands, gamma), 1.0));
    if (config.model.coupling.is_zero())
        summary.add(assert_less("decoupled-exact",
                                "max relative deviation from the closed-form bands",
                                closed_form_band_error(config.model, bands),
                                config.threshold("decoupled_exact", 1e-12)));
}

void run_conditions(const ExperimentConfig& config, const std::string& dir, Summary& summary) {
    auto grid = uniform_theta_grid(config.model.d, config.theta_points);
    R2Report r2 = check_r2(config.model, grid);
    R2PrimeReport r2p = check_r2_prime(config.model);
    BandOptions opts;
    opts.threads = config.threads;
    Bands bands = band_structure(config.model, grid, opts);
    E1E2Options eopts;
    eopts.hessian_tol = config.threshold("e1_hessian_tol", 1e-3);
    eopts.variance_tol = config.threshold("e2_variance_tol", 1e-6);
    E1E2Report e = check_e1_e2(bands, eopts);
    GroupSpeed speed = max_group_speed(bands);

    write_bands_csv(bands, dir + "/data_bands.csv");
    {
        CsvWriter csv(dir + "/data_conditions.csv", {"quantity", "value"});
        csv.raw_row("kappa_sq," + std::to_string(r2.kappa_sq));
        csv.raw_row("r2prime_lhs," + std::to_string(r2p.lhs));
        csv.raw_row("r2prime_rhs," + std::to_string(r2p.rhs));
        csv.raw_row("gamma_hat," + std::to_string(speed.gamma_hat));
        csv.raw_row("min_pair_variance," + std::to_string(e.min_pair_variance));
        for (std::size_t l = 0; l < e.small_hessian_fraction.size(); ++l)
            csv.raw_row("e1_small_fraction_band" + std::to_string(l) + "," +
                        std::to_string(e.small_hessian_fraction[l]));
    }
    summary.add(assert_greater("positivity-certificate",
                               "grid minimum of the lowest cell eigenvalue", r2.kappa_sq, 0.0));
    summary.add(assert_less("quadratic-smallness",
                            "cell average of |sum_k R(k+y)|^2 against nu0^2 m0^2 / 2", r2p.lhs,
                            r2p.rhs));
    summary.add(assert_true("hessian-nondegenerate",
                            "every band has < 5% of samples with a near-zero Hessian",
                            e.e1_pass));
    summary.add(assert_greater("band-combinations-nonconstant",
                               "min variance over band sums/differences", e.min_pair_variance,
                               config.threshold("e2_variance_tol", 1e-6)));
}

void run_converge(const ExperimentConfig& config, const std::string& dir, Summary& summary) {
    GridSpectraOptions gopts;
    gopts.threads = config.threads;
    GridSpectra gs = compute_grid_spectra(config.model, gopts);
    TestFunction tf = build_test_function(config.zfun, gs, config.threads);

    CovarianceTable q0 = initial_covariance_table(config.init, gs, config.threads);
    CovarianceTable qinf = limit_covariance_table(q0, gs, config.threads);
    double q_limit = quadratic_form(qinf, tf.field);

    std::vector<double> ts = config.times;
    CsvWriter csv(dir + "/data_converge.csv", {"t", "q_t", "rel_error"});
    std::vector<double> rel;
    for (double t : ts) {
        // (q_t Z, Z) = (q_0 G^dagger Z, G^dagger Z): evolve the dual field.
        ZakField zt = adjoint_evolve(tf.field, gs, t, config.threads);
        double qt = quadratic_form(q0, zt);
        double r = std::abs(qt - q_limit) / q_limit;
        rel.push_back(r);
        csv.row({t, qt, r});
    }
    summary.add(assert_greater("limit-variance-positive", "Q_inf(Z,Z)", q_limit, 0.0));
    summary.add(assert_less("covariance-convergence",
                            "relative |Q_t - Q_inf| at the final time", rel.back(),
                            config.threshold("converge_rel", 0.02)));
    double early = 0.0, late = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] <= ts.back() / 4.0) early = std::max(early, rel[i]);
        if (ts[i] >= ts.back() / 2.0) late = std::max(late, rel[i]);
    }
    summary.add(assert_less("oscillation-envelope-decays",
                            "max relative error over the late window vs the early window",
                            late, std::max(early, 1e-300)));
}

void run_decay(const ExperimentConfig& config, const std::string& dir, Summary& summary) {
    GridSpectraOptions gopts;
    gopts.threads = config.threads;
    GridSpectra gs = compute_grid_spectra(config.model, gopts);
    TestFunction tf = build_test_function(config.zfun, gs, config.threads);
    // The bound region is valid for any speed above the content's own
    // maximum, so the cone uses the model-wide group-speed bound.
    double gamma = gs.gamma_hat;

    const double v_factor = config.threshold("cone_factor", 1.3);
    std::vector<double> ts = config.times;
    auto profile = decay_profile(tf.field, gs, ts, v_factor, gamma, config.threads);

    CsvWriter csv(dir + "/data_decay.csv", {"t", "sup_all", "sup_in", "sup_out"});
    std::vector<double> fit_t, fit_y;
    double out_ratio_100 = 0.0;
    for (const auto& p : profile) {
        csv.row({p.t, p.sup_all, p.sup_inside, p.sup_outside});
        if (p.t >= 20.0 && p.t <= 200.0) {
            fit_t.push_back(p.t);
            fit_y.push_back(p.sup_all);
        }
        if (std::abs(p.t - 100.0) < 1e-9) out_ratio_100 = p.sup_outside / p.sup_all;
    }
    FitResult fit = log_log_fit(fit_t, fit_y);
    double target = config.threshold("decay_slope", -0.5 * config.model.d);
    summary.add(assert_less("sup-norm-decay-exponent",
                            "|fitted slope - target| for log sup vs log t",
                            std::abs(fit.slope - target),
                            config.threshold("decay_slope_tol", 0.1)));
    summary.add(assert_less("outside-cone-suppression",
                            "sup outside the cone over global sup at t = 100", out_ratio_100,
                            config.threshold("cone_ratio", 1e-6)));
}

void run_gaussianity(const ExperimentConfig& config, const std::string& dir, Summary& summary) {
    GridSpectraOptions gopts;
    gopts.threads = config.threads;
    GridSpectra gs = compute_grid_spectra(config.model, gopts);
    TestFunction tf = build_test_function(config.zfun, gs, config.threads);

    CovarianceTable q0 = initial_covariance_table(config.init, gs, config.threads);
    CovarianceTable qinf = limit_covariance_table(q0, gs, config.threads);
    double q_limit = quadratic_form(qinf, tf.field);

    EnsembleConfig ens;
    ens.samples = config.samples;
    ens.seed = config.seed;
    ens.init = config.init;
    ens.threads = config.threads;

    double t0 = config.times.front();
    double t1 = config.times.back();
    RVec x0 = sample_pairings(ens, gs, t0, tf.field);
    RVec x1 = sample_pairings(ens, gs, t1, tf.field);
    NormalityStats early = normality_stats(x0);
    NormalityStats late = normality_stats(x1);

    double s_max = config.s_max > 0.0 ? config.s_max : 3.0 / std::sqrt(q_limit);
    std::vector<double> s_grid;
    for (int i = 0; i < config.s_points; ++i)
        s_grid.push_back(s_max * i / std::max(1, config.s_points - 1));
    auto table = empirical_char_functional(x1, s_grid, q_limit);

    {
        CsvWriter csv(dir + "/data_char_functional.csv",
                      {"s", "re", "im", "stderr_re", "stderr_im", "gauss_ref"});
        for (const auto& p : table)
            csv.row({p.s, p.re, p.im, p.stderr_re, p.stderr_im, p.gauss_ref});
    }
    {
        CsvWriter csv(dir + "/data_normality.csv",
                      {"t", "skewness", "skewness_stderr", "excess_kurtosis", "kurtosis_stderr"});
        csv.row({t0, early.skewness, early.skewness_stderr, early.excess_kurtosis,
                 early.kurtosis_stderr});
        csv.row({t1, late.skewness, late.skewness_stderr, late.excess_kurtosis,
                 late.kurtosis_stderr});
    }

    summary.add(assert_greater("initially-non-gaussian",
                               "|excess kurtosis| of <Y(0), Z> for two-point noise",
                               std::abs(early.excess_kurtosis),
                               config.threshold("kurtosis_initial", 0.5)));
    summary.add(assert_less("kurtosis-relaxes", "|excess kurtosis| at the late time",
                            std::abs(late.excess_kurtosis),
                            config.threshold("kurtosis_late", 0.1)));
    double worst = 0.0;
    for (const auto& p : table) {
        if (p.s == 0.0) continue;
        double dev_re = std::abs(p.re - p.gauss_ref) / (3.0 * p.stderr_re);
        double dev_im = std::abs(p.im) / (3.0 * p.stderr_im);
        worst = std::max(worst, std::max(dev_re, dev_im));
    }
    summary.add(assert_less("char-functional-gaussian",
                            "max |empirical - Gaussian| in units of 3 stderr", worst, 1.0));
}

void run_mixing(const ExperimentConfig& config, const std::string& dir, Summary& summary) {
    GridSpectraOptions gopts;
    gopts.threads = config.threads;
    GridSpectra gs = compute_grid_spectra(config.model, gopts);
    TestFunction tf = build_test_function(config.zfun, gs, config.threads);
    TestFunction tf1 = build_test_function(config.zfun1, gs, config.threads);

    CovarianceTable q0 = initial_covariance_table(config.init, gs, config.threads);
    CovarianceTable qinf = limit_covariance_table(q0, gs, config.threads);
    double scale = quadratic_form(qinf, tf.field);

    EnsembleConfig ens;
    ens.samples = config.samples;
    ens.seed = config.seed;
    ens.init = config.init;
    ens.threads = config.threads;

    auto points = mixing_correlation(ens, gs, qinf, tf.field, tf1.field, config.times);
    CsvWriter csv(dir + "/data_mixing.csv", {"t", "exact", "mc_mean", "mc_stderr"});
    double final_ratio = 0.0;
    double worst_track = 0.0;
    for (const auto& p : points) {
        csv.row({p.t, p.exact, p.mc_mean, p.mc_stderr});
        final_ratio = std::abs(p.exact) / scale;
        worst_track = std::max(worst_track,
                               std::abs(p.mc_mean - p.exact) / (3.0 * p.mc_stderr));
    }
    summary.add(assert_less("autocorrelation-decays",
                            "|exact correlation| at the final time over Q_inf(Z,Z)",
                            final_ratio, config.threshold("mixing_ratio", 0.05)));
    summary.add(assert_less("monte-carlo-tracks-exact",
                            "max |MC - exact| in units of 3 stderr", worst_track, 1.0));
}

void run_invariance(const ExperimentConfig& config, const std::string& dir, Summary& summary) {
    RngStream rng(config.seed, 0, 7);
    double worst_energy_form = 0.0, worst_group = 0.0, worst_roundtrip = 0.0;
    double worst_parseval = 0.0, worst_reverse = 0.0;

    const int cases = static_cast<int>(config.threshold("invariance_cases", 100));
    for (int c = 0; c < cases; ++c) {
        ModelParams model = random_small_model(rng);
        RVec theta(1);
        theta[0] = 2.0 * pi * rng.uniform01();
        SpectralData spec = cell_spectrum(model, theta);
        const int m = spec.dim();
        double t = 4.0 * rng.uniform01() - 2.0;
        double s = 4.0 * rng.uniform01() - 2.0;

        Mat g_t = propagator_matrix(spec, t);
        Mat energy_form = Mat::Zero(2 * m, 2 * m);
        energy_form.topLeftCorner(m, m) = spec.h;
        energy_form.bottomRightCorner(m, m) = Mat::Identity(m, m);
        double scale = spec.h.cwiseAbs().maxCoeff();
        worst_energy_form = std::max(
            worst_energy_form,
            (g_t.adjoint() * energy_form * g_t - energy_form).cwiseAbs().maxCoeff() / scale);
        worst_group = std::max(worst_group,
                               (propagator_matrix(spec, t + s) - g_t * propagator_matrix(spec, s))
                                       .cwiseAbs()
                                       .maxCoeff() /
                                   std::max(1.0, scale));

        GridSpectra gs = compute_grid_spectra(model);
        LatticeState state = random_state(model, rng);
        ZakField zf = zak_forward(state, model);
        LatticeState back = zak_inverse(zf, model);
        double amp = std::max(1.0, state.max_abs());
        worst_roundtrip = std::max(
            worst_roundtrip,
            std::max({(back.psi - state.psi).cwiseAbs().maxCoeff(),
                      (back.pi - state.pi).cwiseAbs().maxCoeff(),
                      (back.u - state.u).cwiseAbs().maxCoeff(),
                      (back.v - state.v).cwiseAbs().maxCoeff()}) /
                amp);

        LatticeState other = random_state(model, rng);
        ZakField zo = zak_forward(other, model);
        worst_parseval =
            std::max(worst_parseval, std::abs(pairing(zf, zo).real() -
                                              physical_inner(state, other)) /
                                         std::max(1.0, std::abs(physical_inner(state, other))));

        double t_round = 1.0 + 3.0 * rng.uniform01();
        ZakField fwd = evolve(zf, gs, t_round);
        ZakField rev = evolve(fwd, gs, -t_round);
        worst_reverse = std::max(worst_reverse,
                                 std::max((rev.y0 - zf.y0).cwiseAbs().maxCoeff(),
                                          (rev.y1 - zf.y1).cwiseAbs().maxCoeff()) /
                                     amp);
    }

    // Trace invariance and the equilibrium fixed point.
    double worst_trace = 0.0, worst_gibbs_evolve = 0.0, worst_gibbs_limit = 0.0;
    {
        ModelParams model;
        model.d = 1;
        model.n = 1;
        model.K = 4;
        model.N = 32;
        model.coupling = CouplingSpec::gaussian(0.1, 0.2);
        const int q_cases = static_cast<int>(config.threshold("trace_cases", 50));
        const std::vector<double> trace_times = {0.0, 0.1, 1.0, 10.0, 100.0};
        for (int c = 0; c < q_cases; ++c) {
            RVec theta(1);
            theta[0] = 2.0 * pi * (c % 16) / 16.0;
            SpectralData spec = cell_spectrum(model, theta);
            Mat q = random_psd(2 * spec.dim(), rng);
            double ref = trace_diagnostic(q, spec);
            for (double t : trace_times) {
                double tr = trace_diagnostic(evolve_covariance(q, spec, t), spec);
                worst_trace = std::max(worst_trace, std::abs(tr - ref) / (1.0 + std::abs(ref)));
            }
        }

        GridSpectra gs = compute_grid_spectra(model);
        InitialMeasureSpec gibbs;
        gibbs.kind = InitialMeasureSpec::Kind::Gibbs;
        gibbs.temperature = 1.0;
        CovarianceTable q0 = initial_covariance_table(gibbs, gs);
        for (double t : {0.3, 2.0, 17.0}) {
            CovarianceTable qt = evolve_covariance_table(q0, gs, t);
            for (int j = 0; j < q0.grid_size(); ++j)
                worst_gibbs_evolve = std::max(
                    worst_gibbs_evolve, (qt.q[j] - q0.q[j]).cwiseAbs().maxCoeff());
        }
        CovarianceTable ql = limit_covariance_table(q0, gs);
        for (int j = 0; j < q0.grid_size(); ++j)
            worst_gibbs_limit =
                std::max(worst_gibbs_limit, (ql.q[j] - q0.q[j]).cwiseAbs().maxCoeff());
    }

    CsvWriter csv(dir + "/data_invariance.csv", {"check", "max_residual"});
    csv.raw_row("energy_form," + std::to_string(worst_energy_form));
    csv.raw_row("group_law," + std::to_string(worst_group));
    csv.raw_row("zak_round_trip," + std::to_string(worst_roundtrip));
    csv.raw_row("parseval," + std::to_string(worst_parseval));
    csv.raw_row("time_reversal," + std::to_string(worst_reverse));
    csv.raw_row("trace_invariance," + std::to_string(worst_trace));
    csv.raw_row("equilibrium_evolve," + std::to_string(worst_gibbs_evolve));
    csv.raw_row("equilibrium_limit," + std::to_string(worst_gibbs_limit));

    const double tol = config.threshold("invariance_tol", 1e-10);
    summary.add(assert_less("energy-form-preserved", "max |G* diag(H,1) G - diag(H,1)| (rel)",
                            worst_energy_form, tol));
    summary.add(assert_less("group-law", "max |G(t+s) - G(t)G(s)| (rel)", worst_group, tol));
    summary.add(assert_less("zak-round-trip", "max round-trip residual (rel)", worst_roundtrip,
                            config.threshold("roundtrip_tol", 1e-12)));
    summary.add(assert_less("grid-parseval", "max |mode pairing - physical inner| (rel)",
                            worst_parseval, tol));
    summary.add(assert_less("time-reversal", "max |evolve(-t) evolve(t) - id| (rel)",
                            worst_reverse, tol));
    summary.add(assert_less("trace-invariance", "max relative trace drift", worst_trace, tol));
    summary.add(assert_less("equilibrium-fixed-point-evolve",
                            "max |q_t - q_0| for the equilibrium covariance", worst_gibbs_evolve,
                            tol));
    summary.add(assert_less("equilibrium-fixed-point-limit",
                            "max |limit(q_0) - q_0| for the equilibrium covariance",
                            worst_gibbs_limit, tol));
}

void run_coupling_scan(const ExperimentConfig& config, const std::string& dir, Summary& summary) {
    std::vector<CouplingSpec> components = config.scan_components;
    std::vector<RVec> amplitudes = config.scan_amplitudes;
    if (components.empty()) {
        CouplingSpec a = CouplingSpec::gaussian(1.0, 0.2, config.model.d, config.model.n);
        CouplingSpec b = CouplingSpec::gaussian(1.0, 0.35, config.model.d, config.model.n);
        b.terms[0].center = RVec::Constant(config.model.d, 0.3);
        components = {a, b};
    }
    if (amplitudes.empty()) {
        for (double c : {0.0, 0.01, 0.02, 0.05, 0.1, 10.0}) {
            RVec row = RVec::Zero(components.size());
            row[0] = c;
            if (components.size() > 1) row[1] = 0.5 * c;
            amplitudes.push_back(row);
        }
    }
    BandOptions bopts;
    bopts.threads = config.threads;
    auto rows = scan_coupling(config.model, components, amplitudes,
                              uniform_theta_grid(config.model.d, config.theta_points), bopts);

    CsvWriter csv(dir + "/data_coupling_scan.csv",
                  {"row", "skipped", "r2prime_lhs", "e1_pass", "e2_pass", "min_pair_variance",
                   "max_small_fraction"});
    bool zero_row_pass = false;
    int checked = 0, passed = 0, skipped = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        csv.row({static_cast<double>(i), r.skipped ? 1.0 : 0.0, r.r2prime_lhs,
                 r.e1_pass ? 1.0 : 0.0, r.e2_pass ? 1.0 : 0.0, r.min_pair_variance,
                 r.max_small_fraction});
        if (r.skipped) {
            ++skipped;
            continue;
        }
        ++checked;
        if (r.e1_pass && r.e2_pass) ++passed;
        if (r.amplitudes.cwiseAbs().maxCoeff() == 0.0) zero_row_pass = r.e1_pass && r.e2_pass;
    }
    summary.add(assert_true("decoupled-row-passes", "the zero-amplitude row satisfies both verdicts",
                            zero_row_pass));
    summary.add(assert_true("all-checked-rows-pass",
                            "every row passing the smallness gate satisfies both verdicts",
                            checked > 0 && passed == checked));
    summary.add(assert_true("oversized-rows-skipped",
                            "rows failing the smallness gate are skipped, not judged",
                            skipped > 0));
}

}  // namespace

std::vector<double> default_times(const std::string& experiment) {
    if (experiment == "converge") return {1, 2, 5, 10, 20, 50, 100, 150, 200};
    if (experiment == "decay") return {20, 28, 40, 56, 79, 100, 112, 158, 200};
    if (experiment == "gaussianity") return {0, 200};
    if (experiment == "mixing") return {0, 10, 25, 50, 75, 100};
    return {};
}

TestFunctionSpec default_test_function(const std::string& experiment, const ModelParams& model,
                                       bool secondary) {
    TestFunctionSpec spec;
    // The decay probe is band-pure: the lowest band alone carries strong
    // curvature everywhere once its flat spot is cut, which keeps the
    // caustic cut thin. Statistics probes keep the six lowest bands.
    spec.band_limit = experiment == "decay" ? 1 : 6;
    spec.cutoff_delta = experiment == "decay" ? 0.3 : 0.15;
    // Avoided crossings repel by twice the coupling matrix element, so the
    // decay cut must flag gaps up to that scale or the hybridization zone
    // leaks rough eigenvector rotation into the window.
    spec.crossing_gap_tol = experiment == "decay" ? 0.15 : 0.02;
    spec.hessian_cutoff = experiment == "decay";
    spec.hessian_tol = 0.25;
    if (secondary) {
        LatticePoint point;
        point.slot = 0;
        point.cell = IVec::Zero(model.d);
        point.cell[0] = 3;
        point.weight = RVec::Constant(model.n, 1.0);
        spec.points.push_back(point);
        return spec;
    }
    if (experiment == "gaussianity" || experiment == "decay") {
        // Lattice content: strong curvature on the acoustic-like band gives
        // the clean dispersive envelope, and a near-point weight keeps the
        // two-point noise pairing visibly non-Gaussian at t = 0.
        LatticePoint point;
        point.slot = 0;
        point.cell = IVec::Zero(model.d);
        point.weight = RVec::Constant(model.n, 1.0);
        spec.points.push_back(point);
        if (experiment == "decay") {
            LatticePoint momentum = point;
            momentum.slot = 1;
            momentum.weight = RVec::Constant(model.n, 0.5);
            spec.points.push_back(momentum);
        }
        return spec;
    }
    GaussianPacket p0;
    p0.slot = 0;
    p0.amplitude = 1.0;
    p0.center = RVec::Zero(model.d);
    p0.width = experiment == "decay" ? 2.0 : 1.0;
    p0.carrier = RVec::Constant(model.d, 2.0);
    GaussianPacket p1 = p0;
    p1.slot = 1;
    p1.amplitude = 0.7;
    p1.width = experiment == "decay" ? 2.3 : 1.3;
    spec.packets = {p0, p1};
    return spec;
}

InitialMeasureSpec default_initial_measure(const std::string& experiment) {
    InitialMeasureSpec spec;
    if (experiment == "converge" || experiment == "gaussianity" || experiment == "mixing") {
        spec.kind = InitialMeasureSpec::Kind::MovingAverage;
        spec.ma_psi.kernel = {KernelSpec::Shape::Gaussian, 1.0, 0.5, 4};
        spec.ma_pi.kernel = {KernelSpec::Shape::Gaussian, 1.8, 0.35, 4};
        spec.ma_u.kernel = {KernelSpec::Shape::Delta, 1.0, 1.0, 0};
        spec.ma_v.kernel = {KernelSpec::Shape::Delta, 1.5, 1.0, 0};
        spec.ma_psi.stream = 0;
        spec.ma_u.stream = 1;
        spec.ma_pi.stream = 2;
        spec.ma_v.stream = 3;
        spec.noise = experiment == "gaussianity" ? NoiseLaw::Rademacher : NoiseLaw::Gaussian;
    }
    return spec;
}

ExperimentResult run_experiment(const ExperimentConfig& raw) {
    ExperimentConfig config = raw;
    if (config.experiment.empty()) throw ConfigError("experiment.name: missing");
    if (config.times.empty()) config.times = default_times(config.experiment);
    if (config.zfun.packets.empty() && config.zfun.points.empty())
        config.zfun = default_test_function(config.experiment, config.model);
    if (config.zfun1.packets.empty() && config.zfun1.points.empty())
        config.zfun1 = default_test_function(config.experiment, config.model, true);
    if (!config.init_explicit &&
        (config.experiment == "converge" || config.experiment == "gaussianity" ||
         config.experiment == "mixing"))
        config.init = default_initial_measure(config.experiment);

    ExperimentResult result;
    result.output_dir = config.out_dir + "/" + config.experiment;
    ensure_directory(result.output_dir);
    result.summary.experiment = config.experiment;
    result.summary.seed = config.seed;

    if (config.experiment == "bands") run_bands(config, result.output_dir, result.summary);
    else if (config.experiment == "conditions") run_conditions(config, result.output_dir, result.summary);
    else if (config.experiment == "converge") run_converge(config, result.output_dir, result.summary);
    else if (config.experiment == "decay") run_decay(config, result.output_dir, result.summary);
    else if (config.experiment == "gaussianity") run_gaussianity(config, result.output_dir, result.summary);
    else if (config.experiment == "mixing") run_mixing(config, result.output_dir, result.summary);
    else if (config.experiment == "invariance") run_invariance(config, result.output_dir, result.summary);
    else if (config.experiment == "coupling-scan") run_coupling_scan(config, result.output_dir, result.summary);
    else throw ConfigError("experiment.name: unknown experiment \"" + config.experiment + "\"");

    result.summary.write_json(result.output_dir + "/summary.json");
    result.exit_code = result.summary.pass() ? 0 : 1;
    return result;
}

}  // namespace latfield
