#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "latfield/model.hpp"

using namespace latfield;

TEST_CASE("gaussian coupling fourier transform matches the closed form") {
    CouplingSpec spec = CouplingSpec::gaussian(0.1, 0.2);
    RVec xi(1);
    xi[0] = 0.0;
    CHECK(spec.fourier(xi)[0].real() ==
          doctest::Approx(0.1 * std::sqrt(2 * pi) * 0.2).epsilon(1e-12));
    CHECK(spec.fourier(xi)[0].imag() == 0.0);

    // Real coupling: Rhat(-xi) = conj(Rhat(xi)), including offset centers.
    CouplingSpec offset = spec;
    offset.terms[0].center[0] = 0.7;
    xi[0] = 1.3;
    RVec nxi = -xi;
    CHECK(offset.fourier(nxi)[0].real() == doctest::Approx(offset.fourier(xi)[0].real()));
    CHECK(offset.fourier(nxi)[0].imag() == doctest::Approx(-offset.fourier(xi)[0].imag()));
}

TEST_CASE("fourier gradient matches a finite difference") {
    CouplingSpec spec = CouplingSpec::gaussian(0.4, 0.3);
    spec.terms[0].center[0] = 0.25;
    RVec xi(1);
    xi[0] = 2.1;
    RVec xp = xi, xm = xi;
    xp[0] += 1e-6;
    xm[0] -= 1e-6;
    cplx fd = (spec.fourier(xp)[0] - spec.fourier(xm)[0]) / 2e-6;
    cplx grad = spec.fourier_grad(xi, 0)[0];
    CHECK(std::abs(grad - fd) < 1e-8);
}

TEST_CASE("model invariants are enforced") {
    ModelParams model;
    model.d = 1;
    model.n = 1;
    model.K = 2;
    model.N = 16;
    CHECK(model.cell_dim() == 6);
    CHECK_NOTHROW(model.validate());

    model.N = 15;  // odd: the grid would miss pi
    auto errors = model.validation_errors();
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].find("even") != std::string::npos);

    model.N = 16;
    model.m0 = 0.0;
    CHECK_THROWS_AS(model.validate(), ConfigError);
}

TEST_CASE("mode indexing round trips and the theta grid hits 0 and pi") {
    ModelParams model;
    model.d = 2;
    model.n = 1;
    model.K = 2;
    model.N = 8;
    for (int idx = 0; idx < model.field_dim(); ++idx)
        CHECK(model.mode_index(model.mode_from_index(idx)) == idx);

    bool has_zero = false, has_pi = false;
    for (int j = 0; j < model.cells(); ++j) {
        RVec t = model.theta_of_grid_index(j);
        if (t.norm() == 0.0) has_zero = true;
        if (t[0] == pi && t[1] == pi) has_pi = true;
    }
    CHECK(has_zero);
    CHECK(has_pi);

    // Signed representative stays in (-pi, pi] and maps pi to itself.
    CHECK(wrap_to_pi(3.0 * pi / 2.0) == doctest::Approx(-pi / 2.0));
    CHECK(wrap_to_pi(pi) == pi);
    CHECK(wrap_to_pi(2.0 * pi) == doctest::Approx(0.0));
}
