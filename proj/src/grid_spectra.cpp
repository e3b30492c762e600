#include "latfield/grid_spectra.hpp"

#include <cmath>

#include "latfield/parallel.hpp"

namespace latfield {

GridSpectra compute_grid_spectra(const ModelParams& model, const GridSpectraOptions& opts) {
    GridSpectra gs;
    gs.model = model;
    const int G = model.cells();
    const int M = model.cell_dim();
    gs.spec.resize(G);
    gs.gaps.resize(G);
    RMat speeds = RMat::Zero(G, M);

    parallel_for(G, [&](std::size_t j) {
        RVec theta = model.theta_of_grid_index(static_cast<int>(j));
        SpectralData s = cell_spectrum(model, theta, opts.gap_tol);
        gs.gaps[j] = s.min_band_gap();
        // Hellmann-Feynman speeds where the band is separated; degenerate or
        // window-junction bands contribute nothing to the speed bound.
        for (int a = 0; a < model.d; ++a) {
            Mat dh = dh_dtheta(model, theta, a);
            for (int l = 0; l < M; ++l) {
                double gap_lo = l > 0 ? s.omega[l] - s.omega[l - 1] : 1e300;
                double gap_hi = l + 1 < M ? s.omega[l + 1] - s.omega[l] : 1e300;
                if (std::min(gap_lo, gap_hi) < s.gap_tol) continue;
                double hf = (s.vecs.col(l).adjoint() * dh * s.vecs.col(l))(0, 0).real();
                double v = hf / (2.0 * s.omega[l]);
                speeds(j, l) += v * v;
            }
        }
        gs.spec[j] = std::move(s);
    }, opts.threads);

    gs.band_speed = speeds.array().sqrt().colwise().maxCoeff().transpose();
    gs.gamma_hat = gs.band_speed.size() ? gs.band_speed.maxCoeff() : 0.0;
    return gs;
}

double GridSpectra::gamma_for_bands(int band_limit) const {
    if (band_limit < 0 || band_limit >= band_speed.size()) return gamma_hat;
    if (band_limit == 0) return 0.0;
    return band_speed.head(band_limit).maxCoeff();
}

}  // namespace latfield
