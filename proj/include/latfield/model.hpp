/**
 * @file model.hpp
 * @brief Physical parameters of the coupled field--crystal model and the
 *        closed-form coupling family.
 *
 * The model is a scalar field of mass m0 coupled to a harmonic crystal with
 * n displacement components and pinning frequency nu0 on Z^d. The coupling
 * R(x) is a sum of Gaussian bumps, so its Fourier transform
 *   Rhat(xi) = sum_s A_s e^{i xi.c_s} (2pi)^{d/2} sigma_s^d e^{-sigma_s^2 |xi|^2 / 2}
 * is exact (convention Rhat(xi) = int e^{i xi.x} R(x) dx). Every per-theta
 * quantity downstream is evaluated at the signed representative
 * theta_hat in (-pi, pi]^d, which keeps the truncated mode window symmetric
 * under theta -> -theta.
 */
#ifndef LATFIELD_MODEL_HPP
#define LATFIELD_MODEL_HPP

#include <string>
#include <vector>

#include "latfield/common.hpp"

namespace latfield {

struct CouplingTerm {
    RVec amplitude;  // in R^n, one weight per displacement component
    double sigma = 1.0;
    RVec center;  // in R^d
};

struct CouplingSpec {
    std::vector<CouplingTerm> terms;  // empty <=> R == 0

    static CouplingSpec zero() { return {}; }
    static CouplingSpec gaussian(double amplitude, double sigma, int d = 1, int n = 1);

    bool is_zero() const { return terms.empty(); }

    // Rhat(xi) per displacement component.
    Vec fourier(const RVec& xi) const;
    // d Rhat / d xi_axis, per displacement component.
    Vec fourier_grad(const RVec& xi, int axis) const;
    // R(x) in real space.
    RVec real_space(const RVec& x) const;
    // Radius beyond which the real-space tail is negligible for quadrature.
    double tail_radius() const;

    void validate(int d, int n, std::vector<std::string>& errors) const;
};

struct ModelParams {
    int d = 1;            // spatial dimension (1 or 2 supported)
    int n = 1;            // lattice displacement components
    double m0 = 1.0;      // field mass
    double nu0 = 1.0;     // lattice pinning frequency
    int K = 8;            // plane-wave cutoff: modes |m|_inf <= K
    int N = 4096;         // cells per axis of the finite crystal
    CouplingSpec coupling;

    int modes_per_axis() const { return 2 * K + 1; }
    int field_dim() const;                 // (2K+1)^d
    int cell_dim() const { return field_dim() + n; }
    int cells() const;                     // N^d
    int collocation_points() const { return field_dim(); }  // P^d with P = 2K+1

    // Flattened plane-wave mode indexing, row-major over axes, m in [-K, K]^d.
    IVec mode_from_index(int idx) const;
    int mode_index(const IVec& m) const;

    // Grid point j (flattened, row-major) -> theta in [0, 2pi)^d and the
    // signed representative used for operator assembly.
    RVec theta_of_grid_index(int j) const;
    RVec theta_hat_of_grid_index(int j) const;
    IVec grid_coords(int j) const;
    int grid_index(const IVec& coords) const;

    std::vector<std::string> validation_errors() const;
    void validate() const;  // throws ConfigError listing all problems
};

}  // namespace latfield

#endif
