/**
 * @file grid_spectra.hpp
 * @brief Per-grid-point spectral data for the finite crystal, computed once
 *        and shared by the propagator, covariance, and ensemble layers.
 */
#ifndef LATFIELD_GRID_SPECTRA_HPP
#define LATFIELD_GRID_SPECTRA_HPP

#include <vector>

#include "latfield/bloch_cell.hpp"

namespace latfield {

struct GridSpectraOptions {
    double gap_tol = -1.0;  // -1: per-theta default
    int threads = 0;
};

struct GridSpectra {
    ModelParams model;
    std::vector<SpectralData> spec;  // per flattened grid index
    RVec gaps;                       // min adjacent omega gap per grid point
    RVec band_speed;                 // per band: max |grad omega| over separated points
    double gamma_hat = 0.0;          // overall max group speed

    int grid_size() const { return static_cast<int>(spec.size()); }
    // Max group speed over the first `band_limit` bands (all bands if < 0).
    double gamma_for_bands(int band_limit) const;
};

GridSpectra compute_grid_spectra(const ModelParams& model, const GridSpectraOptions& opts = {});

}  // namespace latfield

#endif
