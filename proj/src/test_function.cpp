#include "latfield/test_function.hpp"

#include <cmath>

#include "latfield/dispersion.hpp"
#include "latfield/parallel.hpp"

namespace latfield {

cplx packet_fourier(const std::vector<GaussianPacket>& packets, int slot, const RVec& xi) {
    cplx acc = 0.0;
    for (const auto& p : packets) {
        if (p.slot != slot) continue;
        const int d = static_cast<int>(xi.size());
        const double s2 = p.width * p.width;
        const double norm = std::pow(2.0 * pi, 0.5 * d) * std::pow(p.width, d);
        // cos splits into two shifted Gaussians in frequency.
        RVec plus = xi + p.carrier;
        RVec minus = xi - p.carrier;
        cplx a = std::exp(cplx(0.0, p.phase)) * std::exp(cplx(0.0, plus.dot(p.center))) *
                 std::exp(-0.5 * s2 * plus.squaredNorm());
        cplx b = std::exp(cplx(0.0, -p.phase)) * std::exp(cplx(0.0, minus.dot(p.center))) *
                 std::exp(-0.5 * s2 * minus.squaredNorm());
        acc += 0.5 * p.amplitude * norm * (a + b);
    }
    return acc;
}

namespace {

// Keep count per theta: band_limit extended to the end of any degeneracy
// group it lands in.
int kept_band_count(const SpectralData& s, int band_limit) {
    if (band_limit < 0 || band_limit >= s.dim()) return s.dim();
    int keep = band_limit;
    int g = s.group_of(keep - 1);
    if (g >= 0) keep = std::max(keep, s.groups[g].second);
    return keep;
}

}  // namespace

TestFunction build_test_function(const TestFunctionSpec& spec, const GridSpectra& gs,
                                 int threads) {
    const ModelParams& model = gs.model;
    const int F = model.field_dim();
    const int G = model.cells();

    TestFunction tf;
    tf.spec = spec;
    tf.field = ZakField::zeros(model);
    ZakField& zf = tf.field;

    // Raw mode coefficients: exact packet transforms plus lattice phases.
    parallel_for(G, [&](std::size_t j) {
        RVec that = model.theta_hat_of_grid_index(static_cast<int>(j));
        for (int r = 0; r < F; ++r) {
            RVec xi = that + 2.0 * pi * model.mode_from_index(r).cast<double>();
            zf.y0(r, j) = packet_fourier(spec.packets, 0, xi);
            zf.y1(r, j) = packet_fourier(spec.packets, 1, xi);
        }
        RVec theta = model.theta_of_grid_index(static_cast<int>(j));
        for (const auto& pt : spec.points) {
            double phase = 0.0;
            for (int a = 0; a < model.d; ++a) phase += pt.cell[a] * theta[a];
            cplx e = std::exp(cplx(0.0, phase));
            for (int c = 0; c < model.n; ++c)
                (pt.slot == 0 ? zf.y0 : zf.y1)(F + c, j) += e * pt.weight[c];
        }
    }, threads);

    // Band filter.
    if (spec.band_limit >= 0) {
        parallel_for(G, [&](std::size_t j) {
            const SpectralData& s = gs.spec[j];
            int keep = kept_band_count(s, spec.band_limit);
            Mat basis = s.vecs.leftCols(keep);
            zf.y0.col(j) = basis * (basis.adjoint() * zf.y0.col(j)).eval();
            zf.y1.col(j) = basis * (basis.adjoint() * zf.y1.col(j)).eval();
        }, threads);
    }

    // Cutoff flags: kept-band crossings, optional degenerate Hessians,
    // zone boundary; then dilation by cutoff_delta.
    tf.zero_cells.assign(G, 0);
    if (spec.cutoff_delta > 0.0) {
        std::vector<char> flagged(G, 0);
        const int keep_for_gaps =
            spec.band_limit >= 0 ? std::min(spec.band_limit, model.cell_dim() - 1)
                                 : model.cell_dim() - 1;
        for (int j = 0; j < G; ++j) {
            const RVec& w = gs.spec[j].omega;
            for (int l = 0; l < keep_for_gaps; ++l)
                if (w[l + 1] - w[l] < spec.crossing_gap_tol) flagged[j] = 1;
        }
        if (spec.hessian_cutoff) {
            std::vector<RVec> thetas(G);
            for (int j = 0; j < G; ++j) thetas[j] = model.theta_of_grid_index(j);
            BandOptions bopts;
            bopts.threads = threads;
            Bands bands = band_structure(model, thetas, bopts);
            int kept = spec.band_limit >= 0 ? std::min(spec.band_limit, bands.m) : bands.m;
            for (int l = 0; l < kept; ++l) {
                // Near-zero is relative to the band's curvature scale, as in
                // the flatness verdict: cut the zero set, not small bands.
                double scale = 0.0;
                for (int j = 0; j < G; ++j)
                    if (!bands.flagged[j][l])
                        scale = std::max(scale, std::abs(bands.hessian_dets(j, l)));
                for (int j = 0; j < G; ++j)
                    if (bands.flagged[j][l] ||
                        std::abs(bands.hessian_dets(j, l)) < spec.hessian_tol * scale)
                        flagged[j] = 1;
            }
        }
        // Flags must be mirror-symmetric so the reality symmetrization below
        // cannot repopulate a zeroed cell.
        RealityMap rmap = build_reality_map(model);
        for (int j = 0; j < G; ++j)
            if (flagged[j]) flagged[rmap.paired[j]] = 1;

        // Wrapped cell distance to the nearest flagged cell / zone boundary.
        const double dtheta = 2.0 * pi / model.N;
        const double big = 1e18;
        std::vector<double> dist(G, big);
        for (int j = 0; j < G; ++j)
            if (flagged[j]) dist[j] = 0.0;
        if (model.d == 1) {
            for (int pass = 0; pass < 2; ++pass)
                for (int rep = 0; rep < 2; ++rep)  // wrap: sweep twice
                    for (int s = 0; s < G; ++s) {
                        int j = pass ? G - 1 - s : s;
                        int prev = pass ? (j + 1) % G : (j - 1 + G) % G;
                        dist[j] = std::min(dist[j], dist[prev] + 1.0);
                    }
        } else {
            for (int rep = 0; rep < 4; ++rep) {
                bool changed = false;
                for (int j = 0; j < G; ++j) {
                    IVec c = model.grid_coords(j);
                    for (int a = 0; a < model.d; ++a)
                        for (int s : {-1, 1}) {
                            IVec cc = c;
                            cc[a] += s;
                            double candidate = dist[model.grid_index(cc)] + 1.0;
                            if (candidate < dist[j]) {
                                dist[j] = candidate;
                                changed = true;
                            }
                        }
                }
                if (!changed) break;
            }
        }
        if (spec.cutoff_boundary) {
            for (int j = 0; j < G; ++j) {
                IVec c = model.grid_coords(j);
                for (int a = 0; a < model.d; ++a)
                    dist[j] = std::min(dist[j],
                                       static_cast<double>(std::min(c[a], model.N - c[a])));
            }
        }

        // Exact zero within cutoff_delta of the cut set, then a smooth ramp
        // over one more cutoff_delta. The ramp is the standard C-infinity
        // step, so support-edge waves decay faster than any power and the
        // measured envelopes reflect the interior stationary points only.
        auto bump = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
        for (int j = 0; j < G; ++j) {
            double x = (dist[j] * dtheta - spec.cutoff_delta) / spec.cutoff_delta;
            if (x <= 0.0) {
                tf.zero_cells[j] = 1;
                zf.y0.col(j).setZero();
                zf.y1.col(j).setZero();
            } else if (x < 1.0) {
                double w = bump(x) / (bump(x) + bump(1.0 - x));
                zf.y0.col(j) *= w;
                zf.y1.col(j) *= w;
            }
        }
    }

    // Exact reality, then re-impose the zero cells bit-exactly.
    RealityMap rmap = build_reality_map(model);
    reality_symmetrize(zf, rmap);
    for (int j = 0; j < G; ++j)
        if (tf.zero_cells[j]) {
            zf.y0.col(j).setZero();
            zf.y1.col(j).setZero();
        }
    return tf;
}

}  // namespace latfield
