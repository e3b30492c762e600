#include "latfield/propagator.hpp"

#include <cmath>

#include "latfield/parallel.hpp"

namespace latfield {

Mat propagator_matrix(const SpectralData& spec, double t) {
    const int m = spec.dim();
    RVec c(m), s_over(m), s_times(m);
    for (int l = 0; l < m; ++l) {
        double w = spec.omega[l];
        c[l] = std::cos(w * t);
        s_over[l] = std::sin(w * t) / w;
        s_times[l] = -w * std::sin(w * t);
    }
    Mat cosm = spec.vecs * c.asDiagonal() * spec.vecs.adjoint();
    Mat sin_inv = spec.vecs * s_over.asDiagonal() * spec.vecs.adjoint();
    Mat neg_sin = spec.vecs * s_times.asDiagonal() * spec.vecs.adjoint();
    Mat g(2 * m, 2 * m);
    g.topLeftCorner(m, m) = cosm;
    g.topRightCorner(m, m) = sin_inv;
    g.bottomLeftCorner(m, m) = neg_sin;
    g.bottomRightCorner(m, m) = cosm;
    return g;
}

void apply_propagator(const SpectralData& spec, double t, Vec& y0, Vec& y1, bool adjoint) {
    const int m = spec.dim();
    Vec a0 = spec.vecs.adjoint() * y0;
    Vec a1 = spec.vecs.adjoint() * y1;
    for (int l = 0; l < m; ++l) {
        double w = spec.omega[l];
        double c = std::cos(w * t);
        double s = std::sin(w * t);
        cplx b0 = a0[l], b1 = a1[l];
        if (!adjoint) {
            a0[l] = c * b0 + (s / w) * b1;
            a1[l] = -w * s * b0 + c * b1;
        } else {
            a0[l] = c * b0 - w * s * b1;
            a1[l] = (s / w) * b0 + c * b1;
        }
    }
    y0 = spec.vecs * a0;
    y1 = spec.vecs * a1;
}

namespace {

ZakField evolve_impl(const ZakField& zf, const GridSpectra& gs, double t, bool adjoint,
                     int threads) {
    if (!zf.dims_match(gs.model)) throw DimensionMismatch("mode field does not match model");
    ZakField out = zf;
    parallel_for(static_cast<std::size_t>(zf.grid_size()), [&](std::size_t j) {
        Vec y0 = out.y0.col(j);
        Vec y1 = out.y1.col(j);
        apply_propagator(gs.spec[j], t, y0, y1, adjoint);
        out.y0.col(j) = y0;
        out.y1.col(j) = y1;
    }, threads);
    return out;
}

}  // namespace

ZakField evolve(const ZakField& zf, const GridSpectra& gs, double t, int threads) {
    return evolve_impl(zf, gs, t, false, threads);
}

ZakField adjoint_evolve(const ZakField& zf, const GridSpectra& gs, double t, int threads) {
    return evolve_impl(zf, gs, t, true, threads);
}

double mode_energy(const ZakField& zf, const GridSpectra& gs) {
    double acc = 0.0;
    for (int j = 0; j < zf.grid_size(); ++j) {
        acc += zf.y1.col(j).squaredNorm();
        acc += (zf.y0.col(j).adjoint() * gs.spec[j].h * zf.y0.col(j))(0, 0).real();
    }
    return 0.5 * acc / zf.grid_size();
}

std::vector<LatticeState> solve(const LatticeState& initial, const GridSpectra& gs,
                                const std::vector<double>& times, int threads) {
    ZakField zf = zak_forward(initial, gs.model);
    std::vector<LatticeState> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(zak_inverse(evolve(zf, gs, t, threads), gs.model));
    return out;
}

std::vector<DecayPoint> decay_profile(const ZakField& z, const GridSpectra& gs,
                                      const std::vector<double>& times, double v_factor,
                                      double gamma, int threads) {
    const ModelParams& model = gs.model;
    double t_max = 0.0;
    for (double t : times) t_max = std::max(t_max, std::abs(t));
    if (0.5 * model.N <= 1.5 * gamma * t_max)
        throw WraparoundRisk(model.N, 3.0 * gamma * t_max);

    // Wrapped Euclidean cell distance from the origin cell.
    std::vector<double> cell_dist(model.cells());
    for (int k = 0; k < model.cells(); ++k) {
        IVec c = model.grid_coords(k);
        double d2 = 0.0;
        for (int a = 0; a < model.d; ++a) {
            double w = std::min(c[a], model.N - c[a]);
            d2 += w * w;
        }
        cell_dist[k] = std::sqrt(d2);
    }

    std::vector<DecayPoint> profile;
    for (double t : times) {
        LatticeState state = zak_inverse(adjoint_evolve(z, gs, t, threads), gs.model);
        DecayPoint p;
        p.t = t;
        const double radius = v_factor * gamma * t;
        for (int k = 0; k < model.cells(); ++k) {
            double local = std::max(state.psi.col(k).cwiseAbs().maxCoeff(),
                                    state.pi.col(k).cwiseAbs().maxCoeff());
            local = std::max(local, state.u.col(k).cwiseAbs().maxCoeff());
            local = std::max(local, state.v.col(k).cwiseAbs().maxCoeff());
            p.sup_all = std::max(p.sup_all, local);
            if (cell_dist[k] > radius)
                p.sup_outside = std::max(p.sup_outside, local);
            else
                p.sup_inside = std::max(p.sup_inside, local);
        }
        profile.push_back(p);
    }
    return profile;
}

}  // namespace latfield
