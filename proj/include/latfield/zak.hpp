/**
 * @file zak.hpp
 * @brief Physical states on the finite periodic crystal and their mode-space
 *        representation: the discrete Zak transform pair.
 *
 * A state carries the field at P = 2K+1 collocation points per axis in each
 * of the N^d cells plus n lattice components per cell, for positions and
 * momenta. The forward transform is a DFT across cells followed by the
 * per-theta change to plane-wave coefficients (including the cell-coordinate
 * phase twist); it is a bijection, so round trips are exact to rounding.
 *
 * Mode coefficients of a real state satisfy, with theta_hat the signed grid
 * representative, a_m(-theta) = conj(a_{-m}(theta)) for the field and plain
 * conjugation for the lattice rows; on the pi-per-axis self-conjugate points
 * the mode reflection wraps by one window slot (collocation aliasing).
 */
#ifndef LATFIELD_ZAK_HPP
#define LATFIELD_ZAK_HPP

#include <vector>

#include "latfield/model.hpp"

namespace latfield {

struct LatticeState {
    int d = 1, n = 1, K = 0, N = 2;
    RMat psi;  // P^d x N^d: row = intra-cell offset, column = cell
    RMat pi;
    RMat u;  // n x N^d
    RMat v;

    static LatticeState zeros(const ModelParams& model);
    bool dims_match(const ModelParams& model) const;
    double max_abs() const;
};

struct ZakField {
    int d = 1, n = 1, K = 0, N = 2;
    Mat y0;  // cell_dim x N^d: plane-wave rows then lattice rows, column = grid j
    Mat y1;

    static ZakField zeros(const ModelParams& model);
    bool dims_match(const ModelParams& model) const;
    int grid_size() const;
    int rows() const { return static_cast<int>(y0.rows()); }
};

ZakField zak_forward(const LatticeState& state, const ModelParams& model);

// Exact inverse; throws NonRealField when the reality constraint is violated
// beyond `reality_tol`, otherwise discards the rounding-level imaginary part.
LatticeState zak_inverse(const ZakField& zf, const ModelParams& model,
                         double reality_tol = 1e-8);

// Conjugation map C with C(zf) == zf exactly for transforms of real states.
struct RealityMap {
    int field_dim = 0;
    std::vector<int> paired;              // grid j -> mirror grid index
    std::vector<std::vector<int>> modes;  // grid j -> field-row permutation
};

RealityMap build_reality_map(const ModelParams& model);
ZakField conjugate_reflect(const ZakField& zf, const RealityMap& map);
double reality_violation(const ZakField& zf, const RealityMap& map);
void reality_symmetrize(ZakField& zf, const RealityMap& map);

// Grid Parseval pairing: (1/N^d) sum_j (Z(theta_j), Y(theta_j)); equals the
// physical inner product (cell-averaged field samples plus lattice sums) for
// transforms of real states.
cplx pairing(const ZakField& y, const ZakField& z);
double physical_inner(const LatticeState& a, const LatticeState& b);

}  // namespace latfield

#endif
