/**
 * @file bloch_cell.hpp
 * @brief Unit-cell operator at fixed quasimomentum: assembly, spectral data,
 *        functional calculus, and the positivity certificates.
 *
 * Basis: plane waves phi_m(y) = e^{-2 pi i m.y}, |m|_inf <= K (orthonormal in
 * the cell inner product), followed by the n lattice unit vectors. In this
 * basis the cell operator is the Hermitian (2K+1)^d + n matrix
 *
 *   [ diag(|theta_hat + 2 pi m|^2 + m0^2)    c_m(theta)        ]
 *   [ c_m(theta)^dagger                      omega_*^2(theta) I ]
 *
 * with omega_*^2(theta) = sum_a 2(1 - cos theta_a) + nu0^2 and coupling
 * column c_m(theta) = Rhat(theta_hat + 2 pi m). The truncation K defines the
 * implemented model; every downstream statement is exact for it.
 */
#ifndef LATFIELD_BLOCH_CELL_HPP
#define LATFIELD_BLOCH_CELL_HPP

#include <functional>
#include <utility>
#include <vector>

#include "latfield/model.hpp"

namespace latfield {

// Plane-wave coefficients of the cell coupling operator: row = mode index,
// column = displacement component; c_m(theta) = Rhat(theta_hat + 2 pi m).
Mat coupling_coefficients(const ModelParams& model, const RVec& theta);

double omega_star_sq(const ModelParams& model, const RVec& theta);

Mat build_h_theta(const ModelParams& model, const RVec& theta);

// Closed-form d H(theta) / d theta_axis (Hellmann-Feynman ingredient).
Mat dh_dtheta(const ModelParams& model, const RVec& theta, int axis);

struct SpectralData {
    RVec theta;       // as given by the caller
    Mat h;            // the cell matrix
    RVec lambda;      // ascending eigenvalues, all > 0
    RVec omega;       // sqrt(lambda)
    Mat vecs;         // orthonormal eigenvectors, column l
    double gap_tol = 0.0;
    // Degeneracy groups [begin, end) over the sorted eigenvalue index,
    // formed where |lambda_l - lambda_{l+1}| < gap_tol.
    std::vector<std::pair<int, int>> groups;

    int dim() const { return static_cast<int>(lambda.size()); }
    int group_of(int l) const;
    // Smallest gap |omega_l - omega_{l+1}| (infinity for a 1x1 problem).
    double min_band_gap() const;
};

// Default tolerance used to group nearly equal eigenvalues.
double default_gap_tol(const RVec& lambda);

SpectralData spectral_decompose(const Mat& h, double gap_tol = -1.0);
SpectralData cell_spectrum(const ModelParams& model, const RVec& theta, double gap_tol = -1.0);

// sum_l f(omega_l) F_l F_l^dagger. Throws SingularFunction when f is not
// finite at some omega_l.
Mat matrix_function(const SpectralData& spec, const std::function<double(double)>& f);

struct R2Report {
    double kappa_sq = 0.0;  // min over the grid of lambda_1(theta)
    RVec worst_theta;
    bool pass = false;
};

// Finite-K, finite-grid certificate of positive definiteness (reports the
// H^0 eigenvalue bound, weaker than a gradient-weighted bound).
R2Report check_r2(const ModelParams& model, const std::vector<RVec>& theta_grid);

struct R2PrimeReport {
    double lhs = 0.0;  // int_{[0,1]^d} | sum_k R(k+y) |^2 dy
    double rhs = 0.0;  // nu0^2 m0^2 / 2
    double margin = 0.0;
    bool pass = false;
};

R2PrimeReport check_r2_prime(const ModelParams& model, int points_per_axis = 256);

// Uniform theta grid over [0, 2pi)^d with `per_axis` points per axis.
std::vector<RVec> uniform_theta_grid(int d, int per_axis);

}  // namespace latfield

#endif
