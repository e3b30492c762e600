/**
 * @file propagator.hpp
 * @brief Exact per-theta dynamics of the coupled system in mode coordinates,
 *        the adjoint flow, the physical-space solver, and sup-norm decay
 *        measurements of adjoint-evolved test functions.
 *
 * With Omega = sqrt of the cell operator, the flow over time t is the block
 * matrix
 *     G(theta, t) = [  cos(Omega t)            sin(Omega t) Omega^{-1} ]
 *                   [ -Omega sin(Omega t)      cos(Omega t)            ]
 * applied per grid theta; there is no time stepping anywhere. The adjoint
 * flow uses G(theta, t)^dagger, so <evolve(Y), Z> = <Y, adjoint_evolve(Z)>
 * holds exactly under the grid pairing.
 */
#ifndef LATFIELD_PROPAGATOR_HPP
#define LATFIELD_PROPAGATOR_HPP

#include <vector>

#include "latfield/grid_spectra.hpp"
#include "latfield/zak.hpp"

namespace latfield {

Mat propagator_matrix(const SpectralData& spec, double t);

// In-place per-theta application of G (or G^dagger) through the eigenbasis.
void apply_propagator(const SpectralData& spec, double t, Vec& y0, Vec& y1,
                      bool adjoint = false);

ZakField evolve(const ZakField& zf, const GridSpectra& gs, double t, int threads = 0);
ZakField adjoint_evolve(const ZakField& zf, const GridSpectra& gs, double t, int threads = 0);

// Conserved quadratic energy of a mode field (field + lattice, both slots).
double mode_energy(const ZakField& zf, const GridSpectra& gs);

// zak_forward -> exact evolution -> zak_inverse at each requested time.
std::vector<LatticeState> solve(const LatticeState& initial, const GridSpectra& gs,
                                const std::vector<double>& times, int threads = 0);

struct DecayPoint {
    double t = 0.0;
    double sup_all = 0.0;
    double sup_inside = 0.0;
    double sup_outside = 0.0;
};

// Adjoint-evolve a (cutoff, band-limited) dual field and record physical
// sup-norms, splitting space at cell distance v_factor * gamma * t. Throws
// WraparoundRisk unless N/2 > 1.5 * gamma * max(times).
std::vector<DecayPoint> decay_profile(const ZakField& z, const GridSpectra& gs,
                                      const std::vector<double>& times, double v_factor,
                                      double gamma, int threads = 0);

}  // namespace latfield

#endif
