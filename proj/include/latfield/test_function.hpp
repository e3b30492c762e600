/**
 * @file test_function.hpp
 * @brief Dual fields for pairings: exact-Fourier Gaussian packets for the
 *        field slot, finitely supported lattice weights, optional band
 *        filter, and the spectral cutoff that removes crossing, degenerate-
 *        Hessian, and zone-boundary cells from the support.
 */
#ifndef LATFIELD_TEST_FUNCTION_HPP
#define LATFIELD_TEST_FUNCTION_HPP

#include <vector>

#include "latfield/grid_spectra.hpp"
#include "latfield/zak.hpp"

namespace latfield {

// A e^{-|x - x0|^2 / (2 width^2)} cos(carrier.x + phase) placed in slot 0
// (position-like) or slot 1 (momentum-like); its Fourier transform is exact.
struct GaussianPacket {
    int slot = 0;
    double amplitude = 1.0;
    RVec center;
    double width = 1.0;
    RVec carrier;
    double phase = 0.0;
};

struct LatticePoint {
    int slot = 0;
    IVec cell;
    RVec weight;  // in R^n
};

struct TestFunctionSpec {
    std::vector<GaussianPacket> packets;
    std::vector<LatticePoint> points;
    // Keep bands l < band_limit (all bands when < 0). If the limit falls
    // inside a degeneracy group the filter extends to the end of the group.
    int band_limit = -1;
    // Cutoff: exact zeros within `cutoff_delta` (radians) of flagged cells
    // (and of the zone boundary when cutoff_boundary is set), then a smooth
    // ramp back to one over a second cutoff_delta.
    double cutoff_delta = 0.0;
    bool cutoff_boundary = true;
    double crossing_gap_tol = 1e-3;  // flag cells whose kept-band gap is below this
    // Optionally flag cells where a kept band's |D_l| falls below hessian_tol
    // times that band's grid-max |D_l| (cuts the zero set of the curvature).
    bool hessian_cutoff = false;
    double hessian_tol = 0.05;
};

struct TestFunction {
    TestFunctionSpec spec;
    ZakField field;                 // the built mode representation
    std::vector<char> zero_cells;   // cells forced to zero by the cutoff
};

TestFunction build_test_function(const TestFunctionSpec& spec, const GridSpectra& gs,
                                 int threads = 0);

// Exact continuum Fourier transform of the packet sum in one slot.
cplx packet_fourier(const std::vector<GaussianPacket>& packets, int slot, const RVec& xi);

}  // namespace latfield

#endif
