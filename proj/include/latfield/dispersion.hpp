/**
 * @file dispersion.hpp
 * @brief Band sweeps over theta grids and the dispersion diagnostics:
 *        group velocities, Hessian determinants, flatness/non-degeneracy
 *        verdicts, and coupling-amplitude scans.
 *
 * Bands are sorted per theta, never continued analytically through
 * crossings. Stencil-based quantities (velocity checks, Hessians) are only
 * evaluated where the band is separated across the whole stencil; cells
 * failing that are flagged and excluded, mirroring how the critical set is
 * cut out of test-function supports downstream.
 */
#ifndef LATFIELD_DISPERSION_HPP
#define LATFIELD_DISPERSION_HPP

#include <string>
#include <vector>

#include "latfield/bloch_cell.hpp"

namespace latfield {

struct BandOptions {
    bool derivatives = true;   // populate velocities and Hessian determinants
    double fd_step = 1e-4;     // base step; Richardson uses h and h/2
    double gap_tol = -1.0;     // -1: per-theta default
    // A band is stencil-safe when its gap exceeds flag_factor * fd_step at
    // every stencil point.
    double flag_factor = 100.0;
    int threads = 0;
};

struct Bands {
    int d = 1;
    int m = 0;  // bands per theta
    std::vector<RVec> thetas;
    RMat omegas;                         // G x m, ascending per row
    RVec gaps;                           // G, min adjacent omega gap
    std::vector<RMat> velocities;        // G of (m x d); NaN where flagged
    RMat hessian_dets;                   // G x m; NaN where flagged
    std::vector<std::vector<char>> flagged;  // G x m, stencil-degenerate

    int size() const { return static_cast<int>(thetas.size()); }
};

Bands band_structure(const ModelParams& model, const std::vector<RVec>& grid,
                     const BandOptions& opts = {});

// Hellmann-Feynman velocity of one separated band. Throws DegenerateBand
// when the band gap at theta is below gap_tol.
RVec group_velocity(const ModelParams& model, const RVec& theta, int l, double gap_tol = -1.0);

// det of the second-difference Hessian of omega_l, Richardson-extrapolated
// once. Throws DegenerateBand when the stencil crosses a degeneracy.
double hessian_det(const ModelParams& model, const RVec& theta, int l, double fd_step = 1e-4,
                   double gap_tol = -1.0);

struct E1E2Options {
    // |D_l| below hessian_tol times the band's grid-max |D_l| counts as
    // near-degenerate (a zero-set detector, scale-free across bands).
    double hessian_tol = 1e-3;
    double variance_tol = 1e-6;   // band-combination variance must exceed this
    double identical_tol = 1e-8;  // pairs closer than this are one group
    double small_fraction = 0.05;
};

struct E1E2Report {
    std::vector<double> small_hessian_fraction;  // per band
    bool e1_pass = false;
    double min_pair_variance = 0.0;
    int worst_pair_l = -1, worst_pair_lp = -1;
    bool e2_pass = false;
};

E1E2Report check_e1_e2(const Bands& bands, const E1E2Options& opts = {});

struct GroupSpeed {
    double gamma_hat = 0.0;   // max |grad omega_l| over unflagged samples
    double gamma_safe = 0.0;  // with 10% margin
};

GroupSpeed max_group_speed(const Bands& bands);

struct CouplingScanRow {
    RVec amplitudes;
    bool skipped = false;  // failed the quadratic smallness gate
    double r2prime_lhs = 0.0;
    bool e1_pass = false;
    bool e2_pass = false;
    double min_pair_variance = 0.0;
    double max_small_fraction = 0.0;
};

// Scan R_C = sum_s C_s R_s over amplitude vectors C; each row runs the full
// band sweep plus the E1/E2 verdicts, gated on the quadratic condition.
std::vector<CouplingScanRow> scan_coupling(const ModelParams& base,
                                           const std::vector<CouplingSpec>& components,
                                           const std::vector<RVec>& amplitude_vectors,
                                           const std::vector<RVec>& grid,
                                           const BandOptions& opts = {},
                                           const E1E2Options& verdict_opts = {});

void write_bands_csv(const Bands& bands, const std::string& path);

}  // namespace latfield

#endif
