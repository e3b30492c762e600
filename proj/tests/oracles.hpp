// Independent reference computations used by the tests. Everything here is
// deliberately built on a different path than the library code it checks:
// quadrature instead of closed forms, finite differences instead of
// perturbation identities, explicit time steppers instead of spectral
// exponentials.
#ifndef LATFIELD_TESTS_ORACLES_HPP
#define LATFIELD_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "latfield/bloch_cell.hpp"
#include "latfield/covariance.hpp"

namespace oracles {

using latfield::cplx;
using latfield::Mat;
using latfield::RVec;
using latfield::Vec;

// Composite Simpson rule on [a, b] with an even number of panels.
inline cplx simpson(const std::function<cplx(double)>& f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    cplx acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * (h / 3.0);
}

// Plane-wave coefficient of the twisted periodized coupling, computed by
// quadrature of int_0^1 e^{2 pi i m y} e^{i y theta} sum_k e^{i k theta}
// R(k + y) dy for one displacement component (d = 1).
inline cplx coupling_coefficient_quadrature(const latfield::CouplingSpec& coupling, double theta,
                                            int m, int component = 0, int k_range = 40,
                                            int panels = 4096) {
    auto integrand = [&](double y) {
        cplx sum = 0.0;
        RVec x(1);
        for (int k = -k_range; k <= k_range; ++k) {
            x[0] = k + y;
            sum += std::exp(cplx(0.0, k * theta)) * coupling.real_space(x)[component];
        }
        return std::exp(cplx(0.0, 2.0 * latfield::pi * m * y + y * theta)) * sum;
    };
    return simpson(integrand, 0.0, 1.0, panels);
}

// Classic fourth-order Runge-Kutta for dX/dt = A X on C^{2m}.
inline Vec rk4_flow(const Mat& a, Vec x, double t_final, double dt) {
    const int steps = static_cast<int>(std::ceil(std::abs(t_final) / dt));
    const double h = t_final / steps;
    for (int s = 0; s < steps; ++s) {
        Vec k1 = a * x;
        Vec k2 = a * (x + 0.5 * h * k1);
        Vec k3 = a * (x + 0.5 * h * k2);
        Vec k4 = a * (x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

// Block generator [[0, I], [-H, 0]] of the per-theta dynamics.
inline Mat hamiltonian_generator(const Mat& h) {
    const int m = static_cast<int>(h.rows());
    Mat a = Mat::Zero(2 * m, 2 * m);
    a.topRightCorner(m, m) = Mat::Identity(m, m);
    a.bottomLeftCorner(m, m) = -h;
    return a;
}

// Trapezoid Cesaro average of the covariance congruence family, computed
// through literal evolve_covariance calls.
inline Mat cesaro_average_direct(const Mat& q0, const latfield::SpectralData& spec, double t_max,
                                 int steps) {
    Mat acc = 0.5 * (q0 + latfield::evolve_covariance(q0, spec, t_max));
    for (int s = 1; s < steps; ++s)
        acc += latfield::evolve_covariance(q0, spec, t_max * s / steps);
    return acc / steps;
}

// Central finite difference of a scalar function of one theta component.
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double second_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Kolmogorov-Smirnov distance of samples against the standard normal.
inline double ks_statistic_normal(RVec samples) {
    std::sort(samples.data(), samples.data() + samples.size());
    double worst = 0.0;
    const double n = static_cast<double>(samples.size());
    for (int i = 0; i < samples.size(); ++i) {
        double cdf = 0.5 * std::erfc(-samples[i] / std::sqrt(2.0));
        worst = std::max(worst, std::abs((i + 1) / n - cdf));
        worst = std::max(worst, std::abs(cdf - i / n));
    }
    return worst;
}

}  // namespace oracles

#endif
