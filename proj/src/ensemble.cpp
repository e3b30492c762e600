#include "latfield/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "latfield/parallel.hpp"

namespace latfield {

namespace {

double draw(RngStream& rng, NoiseLaw law) {
    switch (law) {
        case NoiseLaw::Rademacher: return rng.rademacher();
        case NoiseLaw::Uniform: return rng.uniform_unit_variance();
        default: return rng.normal();
    }
}

double kernel_value(const KernelSpec& kernel, double r2) {
    if (kernel.shape == KernelSpec::Shape::Delta) return kernel.amplitude;
    return kernel.amplitude * std::exp(-0.5 * r2 / (kernel.sigma * kernel.sigma));
}

// Circular convolution of per-cell noise with a field kernel sampled on the
// collocation grid (offset y = p/P inside each cell).
void convolve_field(const KernelSpec& kernel, const ModelParams& model, const RVec& noise,
                    RMat& out) {
    const int P = model.modes_per_axis();
    const int range = kernel.shape == KernelSpec::Shape::Delta ? 0 : kernel.range;
    if (model.d == 1) {
        for (int k = 0; k < model.N; ++k)
            for (int s = -range; s <= range; ++s) {
                int src = (k - s % model.N + model.N) % model.N;
                for (int p = 0; p < P; ++p) {
                    double x = s + static_cast<double>(p) / P;
                    if (kernel.shape == KernelSpec::Shape::Delta && p != 0) continue;
                    out(p, k) += kernel_value(kernel, x * x) * noise[src];
                }
            }
    } else {
        for (int k1 = 0; k1 < model.N; ++k1)
            for (int k2 = 0; k2 < model.N; ++k2) {
                int k = k1 * model.N + k2;
                for (int s1 = -range; s1 <= range; ++s1)
                    for (int s2 = -range; s2 <= range; ++s2) {
                        int src1 = (k1 - s1 % model.N + model.N) % model.N;
                        int src2 = (k2 - s2 % model.N + model.N) % model.N;
                        double xi = noise[src1 * model.N + src2];
                        for (int p1 = 0; p1 < P; ++p1)
                            for (int p2 = 0; p2 < P; ++p2) {
                                if (kernel.shape == KernelSpec::Shape::Delta && (p1 || p2))
                                    continue;
                                double x1 = s1 + static_cast<double>(p1) / P;
                                double x2 = s2 + static_cast<double>(p2) / P;
                                out(p1 * P + p2, k) +=
                                    kernel_value(kernel, x1 * x1 + x2 * x2) * xi;
                            }
                    }
            }
    }
}

void convolve_lattice(const KernelSpec& kernel, const ModelParams& model, const RMat& noise,
                      RMat& out) {
    const int range = kernel.shape == KernelSpec::Shape::Delta ? 0 : kernel.range;
    if (model.d == 1) {
        for (int k = 0; k < model.N; ++k)
            for (int s = -range; s <= range; ++s) {
                int src = (k - s % model.N + model.N) % model.N;
                out.col(k) += kernel_value(kernel, static_cast<double>(s) * s) * noise.col(src);
            }
    } else {
        for (int k1 = 0; k1 < model.N; ++k1)
            for (int k2 = 0; k2 < model.N; ++k2) {
                int k = k1 * model.N + k2;
                for (int s1 = -range; s1 <= range; ++s1)
                    for (int s2 = -range; s2 <= range; ++s2) {
                        int src1 = (k1 - s1 % model.N + model.N) % model.N;
                        int src2 = (k2 - s2 % model.N + model.N) % model.N;
                        double r2 = static_cast<double>(s1) * s1 + static_cast<double>(s2) * s2;
                        out.col(k) += kernel_value(kernel, r2) * noise.col(src1 * model.N + src2);
                    }
            }
    }
}

}  // namespace

GaussianSampler::GaussianSampler(const CovarianceTable& table, const GridSpectra& gs, int threads)
    : model_(gs.model), rmap_(build_reality_map(gs.model)) {
    if (table.grid_size() != gs.grid_size())
        throw GridMismatch("covariance table does not match the spectra grid");
    sqrt_.resize(table.grid_size());
    parallel_for(table.grid_size(), [&](std::size_t j) { sqrt_[j] = psd_sqrt(table.q[j]); },
                 threads);
}

ZakField GaussianSampler::sample(RngStream& rng) const {
    const int G = model_.cells();
    const int m = model_.cell_dim();
    const double scale = std::sqrt(static_cast<double>(G));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    ZakField zf = ZakField::zeros(model_);

    for (int j = 0; j < G; ++j) {
        int js = rmap_.paired[j];
        if (js < j) continue;  // filled when its canonical partner is drawn
        Vec zeta(2 * m);
        for (int r = 0; r < 2 * m; ++r) {
            double re = rng.normal();
            double im = rng.normal();
            zeta[r] = cplx(re, im) * inv_sqrt2;
        }
        Vec v = scale * (sqrt_[j] * zeta);
        if (js == j) {
            // Self-conjugate point: symmetrized draw keeps the law and lands
            // exactly on the reality subspace.
            Vec w0 = v.head(m), w1 = v.tail(m);
            Vec c0(m), c1(m);
            const auto& perm = rmap_.modes[j];
            const int F = rmap_.field_dim;
            for (int r = 0; r < F; ++r) {
                c0[r] = std::conj(w0[perm[r]]);
                c1[r] = std::conj(w1[perm[r]]);
            }
            c0.tail(m - F) = w0.tail(m - F).conjugate();
            c1.tail(m - F) = w1.tail(m - F).conjugate();
            zf.y0.col(j) = inv_sqrt2 * (w0 + c0);
            zf.y1.col(j) = inv_sqrt2 * (w1 + c1);
        } else {
            zf.y0.col(j) = v.head(m);
            zf.y1.col(j) = v.tail(m);
            const auto& perm = rmap_.modes[js];
            const int F = rmap_.field_dim;
            for (int r = 0; r < F; ++r) {
                zf.y0(r, js) = std::conj(zf.y0(perm[r], j));
                zf.y1(r, js) = std::conj(zf.y1(perm[r], j));
            }
            zf.y0.col(js).tail(m - F) = zf.y0.col(j).tail(m - F).conjugate();
            zf.y1.col(js).tail(m - F) = zf.y1.col(j).tail(m - F).conjugate();
        }
    }
    return zf;
}

LatticeState sample_initial(const InitialMeasureSpec& spec, const GridSpectra& gs,
                            std::uint64_t seed, std::uint64_t sample_index) {
    const ModelParams& model = gs.model;
    if (spec.kind == InitialMeasureSpec::Kind::MovingAverage) {
        LatticeState state = LatticeState::zeros(model);
        const MAChannel* channels[4] = {&spec.ma_psi, &spec.ma_u, &spec.ma_pi, &spec.ma_v};
        // One noise array per distinct stream id, generated in ascending
        // stream order; field streams are scalar per cell, lattice streams
        // n-vector per cell.
        std::vector<int> streams;
        for (auto* ch : channels)
            if (std::find(streams.begin(), streams.end(), ch->stream) == streams.end())
                streams.push_back(ch->stream);
        std::sort(streams.begin(), streams.end());
        std::vector<RMat> noise(streams.size());
        for (std::size_t s = 0; s < streams.size(); ++s) {
            bool field = channels[0]->stream == streams[s] || channels[2]->stream == streams[s];
            int rows = field ? 1 : model.n;
            RngStream rng(seed, sample_index, static_cast<std::uint64_t>(streams[s]) + 16);
            noise[s].resize(rows, model.cells());
            for (int k = 0; k < model.cells(); ++k)
                for (int r = 0; r < rows; ++r) noise[s](r, k) = draw(rng, spec.noise);
        }
        auto noise_of = [&](int stream) -> const RMat& {
            for (std::size_t s = 0; s < streams.size(); ++s)
                if (streams[s] == stream) return noise[s];
            throw Error("stream lookup failed");
        };
        RVec psi_noise = noise_of(spec.ma_psi.stream).row(0).transpose();
        RVec pi_noise = noise_of(spec.ma_pi.stream).row(0).transpose();
        convolve_field(spec.ma_psi.kernel, model, psi_noise, state.psi);
        convolve_field(spec.ma_pi.kernel, model, pi_noise, state.pi);
        convolve_lattice(spec.ma_u.kernel, model, noise_of(spec.ma_u.stream), state.u);
        convolve_lattice(spec.ma_v.kernel, model, noise_of(spec.ma_v.stream), state.v);
        return state;
    }

    CovarianceTable table = initial_covariance_table(spec, gs);
    GaussianSampler sampler(table, gs);
    RngStream rng(seed, sample_index, 1);
    return zak_inverse(sampler.sample(rng), model);
}

RVec sample_pairings(const EnsembleConfig& config, const GridSpectra& gs, double t,
                     const ZakField& z) {
    const ModelParams& model = gs.model;
    RVec x(config.samples);

    // The Gaussian sampling factorization is shared across samples.
    std::unique_ptr<GaussianSampler> sampler;
    if (config.init.kind != InitialMeasureSpec::Kind::MovingAverage) {
        CovarianceTable table = initial_covariance_table(config.init, gs, config.threads);
        sampler = std::make_unique<GaussianSampler>(table, gs, config.threads);
    }

    parallel_for(config.samples, [&](std::size_t i) {
        ZakField zf;
        if (sampler) {
            RngStream rng(config.seed, i, 1);
            zf = sampler->sample(rng);
            // Round trip through physical space pins the sample to a real state.
            zf = zak_forward(zak_inverse(zf, model), model);
        } else {
            zf = zak_forward(sample_initial(config.init, gs, config.seed, i), model);
        }
        ZakField evolved = evolve(zf, gs, t, 1);
        x[i] = pairing(evolved, z).real();
    }, config.threads);
    return x;
}

QuadraticFormEstimate summarize_variance(const RVec& x) {
    QuadraticFormEstimate est;
    est.samples = static_cast<int>(x.size());
    const double M = static_cast<double>(est.samples);
    est.mean = x.mean();
    RVec centered = x.array() - est.mean;
    double m2 = centered.squaredNorm() / M;
    double m4 = centered.array().pow(4).sum() / M;
    est.variance = m2 * M / (M - 1.0);
    est.stderr_mean = std::sqrt(m2 / M);
    est.stderr_variance = std::sqrt(std::max(0.0, m4 - m2 * m2) / M);
    return est;
}

QuadraticFormEstimate estimate_quadratic_form(const EnsembleConfig& config,
                                              const GridSpectra& gs, double t,
                                              const ZakField& z) {
    return summarize_variance(sample_pairings(config, gs, t, z));
}

std::vector<CharFunctionalPoint> empirical_char_functional(const RVec& pairings,
                                                           const std::vector<double>& s_grid,
                                                           double q_ref) {
    const double M = static_cast<double>(pairings.size());
    std::vector<CharFunctionalPoint> out;
    out.reserve(s_grid.size());
    for (double s : s_grid) {
        CharFunctionalPoint p;
        p.s = s;
        RVec c = (s * pairings.array()).cos();
        RVec si = (s * pairings.array()).sin();
        p.re = c.mean();
        p.im = si.mean();
        p.stderr_re = std::sqrt((c.array() - p.re).square().sum() / M / M);
        p.stderr_im = std::sqrt((si.array() - p.im).square().sum() / M / M);
        p.gauss_ref = std::exp(-0.5 * s * s * q_ref);
        out.push_back(p);
    }
    return out;
}

NormalityStats normality_stats(const RVec& x) {
    NormalityStats stats;
    const double M = static_cast<double>(x.size());
    double mean = x.mean();
    RVec c = x.array() - mean;
    double m2 = c.squaredNorm() / M;
    double m3 = c.array().pow(3).sum() / M;
    double m4 = c.array().pow(4).sum() / M;
    stats.skewness = m3 / std::pow(m2, 1.5);
    stats.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    stats.skewness_stderr = std::sqrt(6.0 / M);
    stats.kurtosis_stderr = std::sqrt(24.0 / M);
    return stats;
}

cplx bilinear_form(const CovarianceTable& table, const ZakField& a, const ZakField& b) {
    if (table.grid_size() != a.grid_size() || a.grid_size() != b.grid_size())
        throw GridMismatch("bilinear form requires one grid");
    const int m = static_cast<int>(a.y0.rows());
    Vec sa(2 * m), sb(2 * m);
    cplx acc = 0.0;
    for (int j = 0; j < a.grid_size(); ++j) {
        sa.head(m) = a.y0.col(j);
        sa.tail(m) = a.y1.col(j);
        sb.head(m) = b.y0.col(j);
        sb.tail(m) = b.y1.col(j);
        acc += sa.dot(table.q[j] * sb);
    }
    return acc / static_cast<double>(a.grid_size());
}

std::vector<MixingPoint> mixing_correlation(const EnsembleConfig& config, const GridSpectra& gs,
                                            const CovarianceTable& q_inf, const ZakField& z,
                                            const ZakField& z1,
                                            const std::vector<double>& times) {
    std::vector<MixingPoint> out;
    out.reserve(times.size());

    GaussianSampler sampler(q_inf, gs, config.threads);
    const ModelParams& model = gs.model;

    // Draws from the invariant measure, reused across times.
    std::vector<ZakField> draws(config.samples);
    RVec base(config.samples);
    parallel_for(config.samples, [&](std::size_t i) {
        RngStream rng(config.seed, i, 2);
        draws[i] = sampler.sample(rng);
        draws[i] = zak_forward(zak_inverse(draws[i], model), model);
        base[i] = pairing(draws[i], z1).real();
    }, config.threads);

    for (double t : times) {
        MixingPoint p;
        p.t = t;
        // Exact pairing: <q_inf G^dagger(t) Z, Z1> via the adjoint flow.
        ZakField zt = adjoint_evolve(z, gs, t, config.threads);
        p.exact = bilinear_form(q_inf, zt, z1).real();
        RVec prod(config.samples);
        parallel_for(config.samples, [&](std::size_t i) {
            ZakField evolved = evolve(draws[i], gs, t, 1);
            prod[i] = pairing(evolved, z).real() * base[i];
        }, config.threads);
        p.mc_mean = prod.mean();
        p.mc_stderr = std::sqrt((prod.array() - p.mc_mean).square().sum()) / prod.size();
        out.push_back(p);
    }
    return out;
}

}  // namespace latfield
