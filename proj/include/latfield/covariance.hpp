/**
 * @file covariance.hpp
 * @brief Second-moment data of random states per grid theta: initial
 *        covariance construction (equilibrium, moving-average, direct),
 *        exact evolution by propagator congruence, the projector-averaged
 *        long-time limit, spectral coefficient form, quadratic forms, and
 *        the weighted trace that the flow preserves exactly.
 *
 * Per theta the covariance is the 2m x 2m Hermitian PSD block matrix
 * q = (q^{ij}), i,j in {0,1}, normalized so that the grid Parseval pairing
 * gives E <Y,Z>^2 = (1/N^d) sum_j (q(theta_j) Z(theta_j), Z(theta_j)).
 *
 * Evolution: q_t = G q_0 G^dagger. Limit: with M the matrix
 *   1/2 [ q00 + H^{-1} q11     q01 - q10        ]
 *       [ q10 - q01            H q00 + q11      ]
 * the limit covariance is sum_g (P_g (+) P_g) M (P_g (+) P_g) over
 * degeneracy groups g, which the Cesaro time average of q_t approaches.
 */
#ifndef LATFIELD_COVARIANCE_HPP
#define LATFIELD_COVARIANCE_HPP

#include <vector>

#include "latfield/grid_spectra.hpp"
#include "latfield/zak.hpp"

namespace latfield {

struct CovarianceTable {
    std::vector<Mat> q;  // per grid j, 2m x 2m

    int grid_size() const { return static_cast<int>(q.size()); }
};

// --- initial measures ------------------------------------------------------

enum class NoiseLaw { Gaussian, Rademacher, Uniform };

struct KernelSpec {
    enum class Shape { Delta, Gaussian } shape = Shape::Delta;
    double amplitude = 1.0;
    double sigma = 1.0;  // Gaussian width (ignored for Delta)
    int range = 0;       // hard support radius in cells; the mixing range
};

struct MAChannel {
    KernelSpec kernel;
    int stream = 0;  // channels with equal stream share the same noise
};

struct InitialMeasureSpec {
    enum class Kind { Gibbs, MovingAverage, Direct } kind = Kind::Gibbs;
    double temperature = 1.0;  // Gibbs
    // Moving average: one kernel + noise stream per physical channel. Field
    // channels may share a stream only with field channels, lattice with
    // lattice (the noise per cell is scalar resp. n-vector).
    MAChannel ma_psi{{}, 0};
    MAChannel ma_u{{}, 1};
    MAChannel ma_pi{{}, 2};
    MAChannel ma_v{{}, 3};
    NoiseLaw noise = NoiseLaw::Gaussian;
    // Direct: a caller-provided table (validated PSD).
    std::vector<Mat> direct;

    void validate(const ModelParams& model) const;  // throws ConfigError / NotPSD
};

// Discrete transform of a channel kernel at frequency xi (field channels,
// sampled on the collocation grid) or at theta (lattice channels).
cplx field_kernel_transform(const KernelSpec& kernel, const ModelParams& model, const RVec& xi);
cplx lattice_kernel_transform(const KernelSpec& kernel, const ModelParams& model,
                              const RVec& theta);

Mat initial_covariance(const InitialMeasureSpec& spec, const GridSpectra& gs, int grid_index);
CovarianceTable initial_covariance_table(const InitialMeasureSpec& spec, const GridSpectra& gs,
                                         int threads = 0);

// --- evolution and limit ----------------------------------------------------

Mat evolve_covariance(const Mat& q0, const SpectralData& spec, double t);
Mat limit_covariance(const Mat& q0, const SpectralData& spec);

CovarianceTable evolve_covariance_table(const CovarianceTable& table, const GridSpectra& gs,
                                        double t, int threads = 0);
CovarianceTable limit_covariance_table(const CovarianceTable& table, const GridSpectra& gs,
                                       int threads = 0);

// Quadratic form (1/N^d) sum_j (q(theta_j) Z(theta_j), Z(theta_j)); real and
// nonnegative for PSD tables (asserted to rounding tolerance).
double quadratic_form(const CovarianceTable& table, const ZakField& z);

// --- spectral representation ------------------------------------------------

struct SpectralCoeffs {
    Mat p00, p01, p10, p11;  // p^{ij}_{l l'} in the eigenbasis

    Eigen::Matrix2cd block(int l, int lp) const {
        Eigen::Matrix2cd b;
        b << p00(l, lp), p01(l, lp), p10(l, lp), p11(l, lp);
        return b;
    }
};

SpectralCoeffs spectral_coeffs(const Mat& q0, const SpectralData& spec);

// Time-evolved 2x2 coefficient of one band pair.
Eigen::Matrix2cd r_matrix(const Eigen::Matrix2cd& p, double omega_l, double omega_lp, double t);

// Reassemble the full covariance from evolved coefficients; equals
// evolve_covariance(q0, spec, t) up to rounding.
Mat assemble_from_r(const SpectralCoeffs& coeffs, const SpectralData& spec, double t);

// --- diagnostics -------------------------------------------------------------

// tr(Omega_ex q Omega_ex) with Omega_ex = diag(Omega, I); invariant under
// evolve_covariance for every t.
double trace_diagnostic(const Mat& q, const SpectralData& spec);

double min_eigenvalue(const Mat& hermitian);
Mat psd_sqrt(const Mat& q);  // throws NotPSD when visibly indefinite

void write_covariance_csv(const CovarianceTable& table, const std::string& path);

}  // namespace latfield

#endif
