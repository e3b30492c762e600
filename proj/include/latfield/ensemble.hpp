/**
 * @file ensemble.hpp
 * @brief Random initial data and Monte-Carlo estimators: Gaussian sampling
 *        with a prescribed per-theta covariance, finite-range moving-average
 *        sampling with non-Gaussian noise, quadratic-form and characteristic-
 *        functional estimates, moment statistics, and the two-estimator
 *        autocorrelation table for the invariant measure.
 *
 * Reproducibility: every sample index owns named RNG streams, and all
 * reductions run in fixed index order, so results are bit-identical under
 * any thread count.
 */
#ifndef LATFIELD_ENSEMBLE_HPP
#define LATFIELD_ENSEMBLE_HPP

#include <cstdint>
#include <vector>

#include "latfield/covariance.hpp"
#include "latfield/propagator.hpp"
#include "latfield/rng.hpp"
#include "latfield/test_function.hpp"

namespace latfield {

struct EnsembleConfig {
    int samples = 1000;
    std::uint64_t seed = 1;
    InitialMeasureSpec init;
    int threads = 0;
};

// Precomputed PSD square roots for per-theta Gaussian sampling on the half
// grid with Hermitian mirroring (self-conjugate points get the symmetrized
// draw, which carries the doubled-variance correction).
class GaussianSampler {
  public:
    GaussianSampler(const CovarianceTable& table, const GridSpectra& gs, int threads = 0);
    ZakField sample(RngStream& rng) const;
    const ModelParams& model() const { return model_; }

  private:
    ModelParams model_;
    RealityMap rmap_;
    std::vector<Mat> sqrt_;  // per grid j
};

// One random initial state. Gaussian kinds sample per theta and transform
// back; the moving-average kind convolves i.i.d. noise with the channel
// kernels in physical space (real by construction, finite-range dependent).
LatticeState sample_initial(const InitialMeasureSpec& spec, const GridSpectra& gs,
                            std::uint64_t seed, std::uint64_t sample_index);

// <Y_i(t), Z> for every sample, in sample order.
RVec sample_pairings(const EnsembleConfig& config, const GridSpectra& gs, double t,
                     const ZakField& z);

struct QuadraticFormEstimate {
    double mean = 0.0;
    double stderr_mean = 0.0;
    double variance = 0.0;        // estimate of Q_t(Z,Z)
    double stderr_variance = 0.0;
    int samples = 0;
};

QuadraticFormEstimate estimate_quadratic_form(const EnsembleConfig& config,
                                              const GridSpectra& gs, double t,
                                              const ZakField& z);
QuadraticFormEstimate summarize_variance(const RVec& x);

struct CharFunctionalPoint {
    double s = 0.0;
    double re = 0.0, im = 0.0;
    double stderr_re = 0.0, stderr_im = 0.0;
    double gauss_ref = 0.0;  // e^{-s^2 q_ref / 2}
};

std::vector<CharFunctionalPoint> empirical_char_functional(const RVec& pairings,
                                                           const std::vector<double>& s_grid,
                                                           double q_ref);

struct NormalityStats {
    double skewness = 0.0, skewness_stderr = 0.0;
    double excess_kurtosis = 0.0, kurtosis_stderr = 0.0;
};

NormalityStats normality_stats(const RVec& x);

struct MixingPoint {
    double t = 0.0;
    double exact = 0.0;    // quadratic-form pairing against the invariant covariance
    double mc_mean = 0.0;  // Monte-Carlo over draws from the invariant measure
    double mc_stderr = 0.0;
};

// (1/N^d) sum_j a_j^dagger q_j b_j.
cplx bilinear_form(const CovarianceTable& table, const ZakField& a, const ZakField& b);

std::vector<MixingPoint> mixing_correlation(const EnsembleConfig& config, const GridSpectra& gs,
                                            const CovarianceTable& q_inf, const ZakField& z,
                                            const ZakField& z1, const std::vector<double>& times);

}  // namespace latfield

#endif
