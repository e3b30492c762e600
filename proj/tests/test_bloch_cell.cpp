#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "latfield/bloch_cell.hpp"
#include "latfield/rng.hpp"
#include "oracles.hpp"

using namespace latfield;

namespace {

ModelParams reference_model(int K = 8, int N = 64) {
    ModelParams model;
    model.d = 1;
    model.n = 1;
    model.m0 = 1.0;
    model.nu0 = 1.0;
    model.K = K;
    model.N = N;
    model.coupling = CouplingSpec::gaussian(0.1, 0.2);
    return model;
}

RVec theta1(double t) {
    RVec theta(1);
    theta[0] = t;
    return theta;
}

ModelParams random_model(RngStream& rng) {
    ModelParams model;
    model.d = 1;
    model.n = 1 + static_cast<int>(rng.next_u64() % 2);
    model.K = static_cast<int>(rng.next_u64() % 4);
    model.m0 = 0.5 + 1.5 * rng.uniform01();
    model.nu0 = 0.5 + 1.5 * rng.uniform01();
    model.N = 8;
    if (rng.uniform01() < 0.75) {
        CouplingTerm term;
        term.amplitude = RVec::Constant(model.n, 0.3 * rng.uniform01());
        term.sigma = 0.15 + 0.5 * rng.uniform01();
        term.center = RVec::Constant(1, 0.4 * rng.uniform01());
        model.coupling.terms.push_back(term);
    }
    return model;
}

}  // namespace

TEST_CASE("coupling coefficients: zero coupling gives the zero vector") {
    ModelParams model = reference_model();
    model.coupling = CouplingSpec::zero();
    Mat c = coupling_coefficients(model, theta1(1.0));
    CHECK(c.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coupling coefficients match the frozen quadrature values") {
    ModelParams model = reference_model(1);
    // theta = 0, m = 0: 0.1 sqrt(2 pi) 0.2.
    Mat c0 = coupling_coefficients(model, theta1(0.0));
    CHECK(std::abs(c0(model.mode_index(IVec::Zero(1)), 0) - cplx(0.0501326, 0.0)) < 1e-7);
    // theta = pi, m = 1: |Rhat(3 pi)| = 0.0501326 e^{-0.02 (3 pi)^2}.
    Mat cpi = coupling_coefficients(model, theta1(pi));
    IVec m1 = IVec::Constant(1, 1);
    CHECK(std::abs(cpi(model.mode_index(m1), 0)) == doctest::Approx(0.00845).epsilon(1e-3));
}

TEST_CASE("coupling coefficients match the periodization quadrature oracle") {
    ModelParams model = reference_model(2);
    model.coupling.terms[0].center[0] = 0.3;  // off-center exercises the phases
    for (double theta : {0.0, 0.9, 2.7}) {
        Mat c = coupling_coefficients(model, theta1(theta));
        for (int m = -2; m <= 2; ++m) {
            cplx oracle =
                oracles::coupling_coefficient_quadrature(model.coupling, theta, m);
            CHECK(std::abs(c(model.mode_index(IVec::Constant(1, m)), 0) - oracle) < 1e-9);
        }
    }
}

TEST_CASE("decoupled cell matrix is the known diagonal") {
    ModelParams model = reference_model(1);
    model.coupling = CouplingSpec::zero();
    Mat h = build_h_theta(model, theta1(0.0));
    const double w = 2.0 * pi;
    // Modes -1, 0, 1 then the lattice entry.
    CHECK(h(0, 0).real() == doctest::Approx(w * w + 1.0));
    CHECK(h(1, 1).real() == doctest::Approx(1.0));
    CHECK(h(2, 2).real() == doctest::Approx(w * w + 1.0));
    CHECK(h(3, 3).real() == doctest::Approx(1.0));
    CHECK((h - Mat(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);

    // Lattice entry at theta = pi: 2(1 - cos pi) + 1 = 5.
    Mat hpi = build_h_theta(model, theta1(pi));
    CHECK(hpi(3, 3).real() == doctest::Approx(5.0));
}

TEST_CASE("coupled cell matrix is exactly hermitian with the coupling column") {
    ModelParams model = reference_model(3);
    model.coupling.terms[0].center[0] = 0.4;
    RVec theta = theta1(1.7);
    Mat h = build_h_theta(model, theta);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    Mat c = coupling_coefficients(model, theta);
    const int F = model.field_dim();
    for (int r = 0; r < F; ++r) CHECK(h(r, F) == c(r, 0));
}

TEST_CASE("hermiticity and eigen residual over random models") {
    RngStream rng(2024, 0, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        ModelParams model = random_model(rng);
        RVec theta = theta1(2.0 * pi * rng.uniform01());
        Mat h = build_h_theta(model, theta);
        REQUIRE((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        if (trial % 25 == 0) {
            SpectralData s = spectral_decompose(h);
            double scale = h.cwiseAbs().maxCoeff();
            REQUIRE((h * s.vecs - s.vecs * s.lambda.asDiagonal().toDenseMatrix())
                        .cwiseAbs()
                        .maxCoeff() <= 1e-10 * scale);
            REQUIRE((s.vecs.adjoint() * s.vecs - Mat::Identity(s.dim(), s.dim()))
                        .cwiseAbs()
                        .maxCoeff() <= 1e-10);
            REQUIRE(std::abs(s.lambda.sum() - h.trace().real()) <=
                    1e-10 * std::abs(h.trace().real()));
        }
    }
}

TEST_CASE("spectral decomposition basics") {
    Mat h(1, 1);
    h(0, 0) = 4.0;
    SpectralData s = spectral_decompose(h);
    CHECK(s.omega[0] == doctest::Approx(2.0));
    CHECK(std::abs(s.vecs(0, 0)) == doctest::Approx(1.0));

    // Field eigenvalue pi^2 + 1 at theta = pi for K = 0.
    ModelParams model = reference_model(0);
    model.coupling = CouplingSpec::zero();
    SpectralData s2 = cell_spectrum(model, theta1(pi));
    CHECK(s2.omega[s2.dim() - 1] == doctest::Approx(std::sqrt(pi * pi + 1.0)).epsilon(1e-12));
    CHECK(s2.omega[s2.dim() - 1] == doctest::Approx(3.2969079).epsilon(1e-7));

    // K = 1, theta = pi: modes 0 and -1 are exactly degenerate.
    ModelParams m1 = reference_model(1);
    m1.coupling = CouplingSpec::zero();
    SpectralData s3 = cell_spectrum(m1, theta1(pi));
    bool found_pair = false;
    for (const auto& [begin, end] : s3.groups)
        if (end - begin == 2 &&
            s3.lambda[begin] == doctest::Approx(pi * pi + 1.0).epsilon(1e-12))
            found_pair = true;
    CHECK(found_pair);
}

TEST_CASE("non-positive spectrum is reported, not silently accepted") {
    ModelParams model = reference_model(2);
    model.coupling = CouplingSpec::gaussian(10.0, 0.2);
    CHECK_THROWS_AS(cell_spectrum(model, theta1(0.0)), NonPositiveSpectrum);
}

TEST_CASE("matrix function reproduces the matrix, identity, and inverse") {
    ModelParams model = reference_model(2);
    RVec theta = theta1(0.8);
    SpectralData s = cell_spectrum(model, theta);
    const int m = s.dim();
    double scale = s.h.cwiseAbs().maxCoeff();

    Mat again = matrix_function(s, [](double w) { return w * w; });
    CHECK((again - s.h).cwiseAbs().maxCoeff() < 1e-10 * scale);

    Mat one = matrix_function(s, [](double) { return 1.0; });
    CHECK((one - Mat::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-12);

    Mat inv = matrix_function(s, [](double w) { return 1.0 / (w * w); });
    CHECK((inv * s.h - Mat::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-10);
    // Cross-check against a direct linear solve.
    Mat solved = s.h.fullPivLu().solve(Mat::Identity(m, m));
    CHECK((inv - solved).cwiseAbs().maxCoeff() < 1e-10);

    CHECK_THROWS_AS(matrix_function(s, [](double w) { return 1.0 / (w - w); }),
                    SingularFunction);
}

TEST_CASE("matrix function is multiplicative for commuting scalar maps") {
    RngStream rng(7, 1, 0);
    for (int trial = 0; trial < 25; ++trial) {
        ModelParams model = random_model(rng);
        SpectralData s = cell_spectrum(model, theta1(2.0 * pi * rng.uniform01()));
        Mat f = matrix_function(s, [](double w) { return std::cos(0.7 * w); });
        Mat g = matrix_function(s, [](double w) { return std::sin(0.7 * w) / w; });
        Mat fg = matrix_function(s, [](double w) { return std::cos(0.7 * w) * std::sin(0.7 * w) / w; });
        REQUIRE((f * g - fg).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("positivity certificate over a grid") {
    ModelParams model = reference_model();
    model.coupling = CouplingSpec::zero();
    auto grid = uniform_theta_grid(1, 64);
    R2Report report = check_r2(model, grid);
    CHECK(report.pass);
    CHECK(report.kappa_sq == doctest::Approx(1.0).epsilon(1e-12));  // min(m0^2, nu0^2)

    // Single-point grid at theta = 0.
    ModelParams uneven = model;
    uneven.m0 = 0.7;
    uneven.nu0 = 1.3;
    R2Report single = check_r2(uneven, {theta1(0.0)});
    CHECK(single.kappa_sq == doctest::Approx(0.49).epsilon(1e-12));

    // A strongly coupled model loses positivity and reports the witness.
    ModelParams bad = reference_model(2);
    bad.coupling = CouplingSpec::gaussian(10.0, 0.2);
    R2Report fail = check_r2(bad, grid);
    CHECK_FALSE(fail.pass);
    CHECK(fail.kappa_sq < 0.0);
    CHECK(fail.worst_theta.size() == 1);
}

TEST_CASE("quadratic smallness condition: pass, closed form, and fail") {
    ModelParams model = reference_model();
    model.coupling = CouplingSpec::zero();
    R2PrimeReport zero = check_r2_prime(model);
    CHECK(zero.pass);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == doctest::Approx(0.5));

    model.coupling = CouplingSpec::gaussian(0.1, 0.2);
    R2PrimeReport ok = check_r2_prime(model);
    CHECK(ok.pass);
    // Near the isolated-bump value A^2 sigma sqrt(pi); the 0.4% excess is the
    // exact neighbor-overlap cross term 2 A^2 sigma sqrt(pi) e^{-1/(4 sigma^2)}.
    double isolated = 0.01 * 0.2 * std::sqrt(pi);
    double overlap = 2.0 * isolated * std::exp(-1.0 / (4.0 * 0.04));
    CHECK(ok.lhs == doctest::Approx(isolated + overlap).epsilon(1e-4));

    model.coupling = CouplingSpec::gaussian(10.0, 0.2);
    R2PrimeReport fail = check_r2_prime(model);
    CHECK_FALSE(fail.pass);
    CHECK(fail.lhs == doctest::Approx(1e4 * (isolated + overlap)).epsilon(1e-4));
}

TEST_CASE("decoupled bands are exact against closed forms") {
    ModelParams model = reference_model(2);
    model.coupling = CouplingSpec::zero();
    for (double t : {0.3, 1.1, 2.9, 4.4, 6.0}) {
        SpectralData s = cell_spectrum(model, theta1(t));
        double that = wrap_to_pi(t);
        std::vector<double> expected = {std::sqrt(2.0 * (1.0 - std::cos(t)) + 1.0)};
        for (int m = -model.K; m <= model.K; ++m)
            expected.push_back(std::sqrt((that + 2 * pi * m) * (that + 2 * pi * m) + 1.0));
        std::sort(expected.begin(), expected.end());
        for (int l = 0; l < s.dim(); ++l)
            REQUIRE(std::abs(s.omega[l] - expected[l]) <= 1e-12 * expected[l]);
    }
}

TEST_CASE("lowest bands nest as the cutoff grows") {
    // Decoupled: exact nesting; coupled: gap shrinks with K (reported).
    ModelParams small = reference_model(2);
    ModelParams big = reference_model(5);
    RVec theta = theta1(1.3);
    SpectralData s_small = cell_spectrum(small, theta);
    SpectralData s_big = cell_spectrum(big, theta);
    double worst = 0.0;
    for (int l = 0; l < s_small.dim(); ++l)
        worst = std::max(worst, std::abs(s_small.lambda[l] - s_big.lambda[l]));
    CHECK(worst < 1e-8);  // reference coupling decays fast in frequency

    ModelParams wide_small = small, wide_big = big;
    wide_small.coupling = CouplingSpec::gaussian(0.3, 0.12);
    wide_big.coupling = CouplingSpec::gaussian(0.3, 0.12);
    double gap_small = 0.0, gap_big = 0.0;
    SpectralData w2 = cell_spectrum(wide_small, theta);
    SpectralData w5 = cell_spectrum(wide_big, theta);
    ModelParams wide_mid = wide_small;
    wide_mid.K = 3;
    SpectralData w3 = cell_spectrum(wide_mid, theta);
    for (int l = 0; l < w2.dim(); ++l) {
        gap_small = std::max(gap_small, std::abs(w2.lambda[l] - w5.lambda[l]));
        if (l < w3.dim()) gap_big = std::max(gap_big, std::abs(w3.lambda[l] - w5.lambda[l]));
    }
    CHECK(gap_big <= gap_small);  // truncation error shrinks as K grows
}

TEST_CASE("mirror symmetry of the spectrum on the grid") {
    ModelParams model = reference_model(3, 32);
    model.coupling.terms[0].center[0] = 0.0;
    for (int j : {1, 5, 9, 13}) {
        SpectralData a = cell_spectrum(model, model.theta_of_grid_index(j));
        SpectralData b = cell_spectrum(model, model.theta_of_grid_index(model.N - j));
        for (int l = 0; l < a.dim(); ++l)
            REQUIRE(std::abs(a.omega[l] - b.omega[l]) <= 1e-10 * a.omega[l]);
    }
}
