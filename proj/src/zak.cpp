#include "latfield/zak.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace latfield {

namespace {

// Cached FFTW plans per (d, N, sign). Creation is serialized; execution on
// caller-owned buffers is thread-safe.
class CellFft {
  public:
    static void run(int d, int N, int sign, cplx* data) {
        fftw_plan plan = get_plan(d, N, sign);
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                         reinterpret_cast<fftw_complex*>(data));
    }

  private:
    static fftw_plan get_plan(int d, int N, int sign) {
        static std::mutex mutex;
        static std::map<std::tuple<int, int, int>, fftw_plan> plans;
        std::lock_guard<std::mutex> lock(mutex);
        auto key = std::make_tuple(d, N, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        std::vector<cplx> scratch(d == 1 ? N : N * N);
        fftw_complex* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = d == 1
            ? fftw_plan_dft_1d(N, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
            : fftw_plan_dft_2d(N, N, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans[key] = plan;
        return plan;
    }
};

// Plane-wave analysis matrix: a = (1/P^d) F diag(twist) samples, with
// F(m, p) = e^{2 pi i m.p / P}. Its inverse is diag(conj twist) F^dagger.
Mat analysis_dft_matrix(const ModelParams& model) {
    const int F = model.field_dim();
    const int P = model.modes_per_axis();
    Mat dft(F, F);
    for (int r = 0; r < F; ++r) {
        IVec m = model.mode_from_index(r);
        for (int p = 0; p < F; ++p) {
            IVec off = model.mode_from_index(p);  // reuse: same flattening, offset = m + K
            double phase = 0.0;
            for (int a = 0; a < model.d; ++a)
                phase += 2.0 * pi * m[a] * (off[a] + model.K) / P;
            dft(r, p) = std::exp(cplx(0.0, phase));
        }
    }
    return dft;
}

Vec twist_vector(const ModelParams& model, const RVec& theta_hat) {
    const int F = model.field_dim();
    const int P = model.modes_per_axis();
    Vec tw(F);
    for (int p = 0; p < F; ++p) {
        IVec off = model.mode_from_index(p);
        double phase = 0.0;
        for (int a = 0; a < model.d; ++a) phase += theta_hat[a] * (off[a] + model.K) / P;
        tw[p] = std::exp(cplx(0.0, phase));
    }
    return tw;
}

// DFT across cells of every row of `rows` (sign +1 for the forward Zak).
Mat cell_dft_rows(const RMat& rows, int d, int N, int sign) {
    Mat out(rows.rows(), rows.cols());
    std::vector<cplx> buf(rows.cols());
    for (int r = 0; r < rows.rows(); ++r) {
        for (int k = 0; k < rows.cols(); ++k) buf[k] = cplx(rows(r, k), 0.0);
        CellFft::run(d, N, sign, buf.data());
        for (int k = 0; k < rows.cols(); ++k) out(r, k) = buf[k];
    }
    return out;
}

Mat cell_dft_rows_c(const Mat& rows, int d, int N, int sign) {
    Mat out(rows.rows(), rows.cols());
    std::vector<cplx> buf(rows.cols());
    for (int r = 0; r < rows.rows(); ++r) {
        for (int k = 0; k < rows.cols(); ++k) buf[k] = rows(r, k);
        CellFft::run(d, N, sign, buf.data());
        for (int k = 0; k < rows.cols(); ++k) out(r, k) = buf[k];
    }
    return out;
}

}  // namespace

LatticeState LatticeState::zeros(const ModelParams& model) {
    LatticeState s;
    s.d = model.d;
    s.n = model.n;
    s.K = model.K;
    s.N = model.N;
    s.psi = RMat::Zero(model.collocation_points(), model.cells());
    s.pi = RMat::Zero(model.collocation_points(), model.cells());
    s.u = RMat::Zero(model.n, model.cells());
    s.v = RMat::Zero(model.n, model.cells());
    return s;
}

bool LatticeState::dims_match(const ModelParams& model) const {
    return d == model.d && n == model.n && K == model.K && N == model.N &&
           psi.rows() == model.collocation_points() && psi.cols() == model.cells() &&
           pi.rows() == psi.rows() && pi.cols() == psi.cols() && u.rows() == model.n &&
           u.cols() == model.cells() && v.rows() == u.rows() && v.cols() == u.cols();
}

double LatticeState::max_abs() const {
    double m = psi.size() ? psi.cwiseAbs().maxCoeff() : 0.0;
    m = std::max(m, pi.size() ? pi.cwiseAbs().maxCoeff() : 0.0);
    m = std::max(m, u.size() ? u.cwiseAbs().maxCoeff() : 0.0);
    m = std::max(m, v.size() ? v.cwiseAbs().maxCoeff() : 0.0);
    return m;
}

ZakField ZakField::zeros(const ModelParams& model) {
    ZakField zf;
    zf.d = model.d;
    zf.n = model.n;
    zf.K = model.K;
    zf.N = model.N;
    zf.y0 = Mat::Zero(model.cell_dim(), model.cells());
    zf.y1 = Mat::Zero(model.cell_dim(), model.cells());
    return zf;
}

bool ZakField::dims_match(const ModelParams& model) const {
    return d == model.d && n == model.n && K == model.K && N == model.N &&
           y0.rows() == model.cell_dim() && y0.cols() == model.cells() &&
           y1.rows() == y0.rows() && y1.cols() == y0.cols();
}

int ZakField::grid_size() const { return static_cast<int>(y0.cols()); }

ZakField zak_forward(const LatticeState& state, const ModelParams& model) {
    if (!state.dims_match(model)) throw DimensionMismatch("state does not match model");
    const int F = model.field_dim();
    const int G = model.cells();
    const double inv_pd = 1.0 / F;

    ZakField zf = ZakField::zeros(model);
    Mat dft = analysis_dft_matrix(model);

    Mat psi_t = cell_dft_rows(state.psi, model.d, model.N, FFTW_BACKWARD);
    Mat pi_t = cell_dft_rows(state.pi, model.d, model.N, FFTW_BACKWARD);
    Mat u_t = cell_dft_rows(state.u, model.d, model.N, FFTW_BACKWARD);
    Mat v_t = cell_dft_rows(state.v, model.d, model.N, FFTW_BACKWARD);

    for (int j = 0; j < G; ++j) {
        Vec tw = twist_vector(model, model.theta_hat_of_grid_index(j));
        zf.y0.col(j).head(F) = inv_pd * (dft * tw.cwiseProduct(psi_t.col(j)));
        zf.y1.col(j).head(F) = inv_pd * (dft * tw.cwiseProduct(pi_t.col(j)));
        zf.y0.col(j).tail(model.n) = u_t.col(j);
        zf.y1.col(j).tail(model.n) = v_t.col(j);
    }
    return zf;
}

LatticeState zak_inverse(const ZakField& zf, const ModelParams& model, double reality_tol) {
    if (!zf.dims_match(model)) throw DimensionMismatch("mode field does not match model");
    const int F = model.field_dim();
    const int G = model.cells();

    Mat dft_adj = analysis_dft_matrix(model).adjoint();
    Mat psi_t(F, G), pi_t(F, G), u_t(model.n, G), v_t(model.n, G);
    for (int j = 0; j < G; ++j) {
        Vec tw = twist_vector(model, model.theta_hat_of_grid_index(j)).conjugate();
        psi_t.col(j) = tw.cwiseProduct(dft_adj * zf.y0.col(j).head(F));
        pi_t.col(j) = tw.cwiseProduct(dft_adj * zf.y1.col(j).head(F));
        u_t.col(j) = zf.y0.col(j).tail(model.n);
        v_t.col(j) = zf.y1.col(j).tail(model.n);
    }

    const double scale = 1.0 / G;
    psi_t = scale * cell_dft_rows_c(psi_t, model.d, model.N, FFTW_FORWARD);
    pi_t = scale * cell_dft_rows_c(pi_t, model.d, model.N, FFTW_FORWARD);
    u_t = scale * cell_dft_rows_c(u_t, model.d, model.N, FFTW_FORWARD);
    v_t = scale * cell_dft_rows_c(v_t, model.d, model.N, FFTW_FORWARD);

    double imag_max = std::max(std::max(psi_t.imag().cwiseAbs().maxCoeff(),
                                        pi_t.imag().cwiseAbs().maxCoeff()),
                               std::max(u_t.imag().cwiseAbs().maxCoeff(),
                                        v_t.imag().cwiseAbs().maxCoeff()));
    double real_max = std::max(std::max(psi_t.real().cwiseAbs().maxCoeff(),
                                        pi_t.real().cwiseAbs().maxCoeff()),
                               std::max(u_t.real().cwiseAbs().maxCoeff(),
                                        v_t.real().cwiseAbs().maxCoeff()));
    if (imag_max > reality_tol * (1.0 + real_max)) throw NonRealField(imag_max);

    LatticeState state = LatticeState::zeros(model);
    state.psi = psi_t.real();
    state.pi = pi_t.real();
    state.u = u_t.real();
    state.v = v_t.real();
    return state;
}

RealityMap build_reality_map(const ModelParams& model) {
    RealityMap map;
    const int G = model.cells();
    const int F = model.field_dim();
    const int P = model.modes_per_axis();
    map.field_dim = F;
    map.paired.resize(G);
    map.modes.assign(G, std::vector<int>(F));
    for (int j = 0; j < G; ++j) {
        IVec c = model.grid_coords(j);
        IVec cs(model.d);
        for (int a = 0; a < model.d; ++a) cs[a] = (model.N - c[a]) % model.N;
        map.paired[j] = model.grid_index(cs);
        for (int r = 0; r < F; ++r) {
            IVec m = model.mode_from_index(r);
            IVec mr(model.d);
            for (int a = 0; a < model.d; ++a) {
                if (2 * c[a] == model.N) {
                    int v = -m[a] - 1;  // collocation alias at theta_hat = pi
                    if (v < -model.K) v += P;
                    mr[a] = v;
                } else {
                    mr[a] = -m[a];
                }
            }
            map.modes[j][r] = model.mode_index(mr);
        }
    }
    return map;
}

ZakField conjugate_reflect(const ZakField& zf, const RealityMap& map) {
    ZakField out = zf;
    const int F = map.field_dim;
    const int n = static_cast<int>(zf.y0.rows()) - F;
    for (int j = 0; j < zf.grid_size(); ++j) {
        int js = map.paired[j];
        for (int r = 0; r < F; ++r) {
            out.y0(r, j) = std::conj(zf.y0(map.modes[j][r], js));
            out.y1(r, j) = std::conj(zf.y1(map.modes[j][r], js));
        }
        out.y0.col(j).tail(n) = zf.y0.col(js).tail(n).conjugate();
        out.y1.col(j).tail(n) = zf.y1.col(js).tail(n).conjugate();
    }
    return out;
}

double reality_violation(const ZakField& zf, const RealityMap& map) {
    ZakField c = conjugate_reflect(zf, map);
    return std::max((zf.y0 - c.y0).cwiseAbs().maxCoeff(),
                    (zf.y1 - c.y1).cwiseAbs().maxCoeff());
}

void reality_symmetrize(ZakField& zf, const RealityMap& map) {
    ZakField c = conjugate_reflect(zf, map);
    zf.y0 = 0.5 * (zf.y0 + c.y0);
    zf.y1 = 0.5 * (zf.y1 + c.y1);
}

cplx pairing(const ZakField& y, const ZakField& z) {
    if (y.y0.rows() != z.y0.rows() || y.y0.cols() != z.y0.cols())
        throw GridMismatch("pairing requires matching mode grids");
    cplx acc = 0.0;
    for (int j = 0; j < y.grid_size(); ++j)
        acc += z.y0.col(j).dot(y.y0.col(j)) + z.y1.col(j).dot(y.y1.col(j));
    return acc / static_cast<double>(y.grid_size());
}

double physical_inner(const LatticeState& a, const LatticeState& b) {
    const double inv_pd = 1.0 / a.psi.rows();
    double acc = inv_pd * (a.psi.cwiseProduct(b.psi).sum() + a.pi.cwiseProduct(b.pi).sum());
    acc += a.u.cwiseProduct(b.u).sum() + a.v.cwiseProduct(b.v).sum();
    return acc;
}

}  // namespace latfield
