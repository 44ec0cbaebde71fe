#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wrc/errors.hpp"
#include "wrc/fft.hpp"
#include "wrc/fft_ops.hpp"
#include "wrc/forward.hpp"
#include "wrc/tensor.hpp"

namespace wrc {

// ---------------------------------------------------------------------------
// Weight parameterization and prediction
// ---------------------------------------------------------------------------

enum class WeightParamMode { None, Softplus, Log1p };

struct WeightParam {
    WeightParamMode mode = WeightParamMode::Log1p;
    double bias = 0.0;
};

inline double softplus(double v) {
    // overflow-safe ln(1+e^v)
    return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
}

/// Default epsilon guard when the learnable-bias path is used.
inline double default_eps(double bias) { return softplus(bias) + 1e-5; }

/// Epsilon guard in pure-solver mode.
constexpr double kFixedEps = 1e-5;

/// Map raw predictor outputs to a nonnegative weight field.
/// None passes values through (the caller guarantees nonnegativity),
/// Softplus applies ln(1+e^v), Log1p applies ln(1+v^2) entrywise.
inline WeightField apply_weight_param(const FeatureMap& raw, const WeightParam& p,
                                      WeightRole role) {
    std::vector<double> out(raw.size());
    switch (p.mode) {
        case WeightParamMode::None:
            out = raw.data();
            break;
        case WeightParamMode::Softplus:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = softplus(raw.data()[i]);
            break;
        case WeightParamMode::Log1p:
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double v = raw.data()[i];
                out[i] = std::log1p(v * v);
            }
            break;
    }
    return WeightField(raw.channels(), raw.height(), raw.width(), std::move(out), role);
}

enum class PredictorKind { Matrix, Convolution };

/// Source of the |W|^2 / |W_lambda|^2 fields: either fixed stored maps or a
/// depthwise convolution applied to the conditioning tensors.
struct WeightPredictor {
    PredictorKind kind = PredictorKind::Matrix;
    // Matrix kind: one stored field per role.
    std::optional<WeightField> w_data;
    std::optional<WeightField> w_reg;
    // Convolution kind: one depthwise kernel per role.
    std::optional<Kernel> conv_w;
    std::optional<Kernel> conv_wlam;
    WeightParam param;
};

/// Produce (w_data, w_reg) from the low-res conditioning tensor and the
/// high-res prior. Convolution kind runs the predictor kernels as circular
/// depthwise convolutions, then the positivity parameterization.
inline std::pair<WeightField, WeightField> predict_weights(const WeightPredictor& pred,
                                                           const FeatureMap& x_lo,
                                                           const FeatureMap& x0) {
    if (pred.kind == PredictorKind::Matrix) {
        if (!pred.w_data || !pred.w_reg) {
            throw ContractError("predict_weights: matrix predictor missing stored fields");
        }
        if (pred.w_data->height() != x_lo.height() || pred.w_data->width() != x_lo.width() ||
            pred.w_reg->height() != x0.height() || pred.w_reg->width() != x0.width()) {
            throw DimensionError("predict_weights: stored field resolution mismatch");
        }
        return {*pred.w_data, *pred.w_reg};
    }
    if (!pred.conv_w || !pred.conv_wlam) {
        throw ContractError("predict_weights: convolution predictor missing kernels");
    }
    FeatureMap raw_data = forward_spatial(x_lo, ForwardSpec{*pred.conv_w, 1});
    FeatureMap raw_reg = forward_spatial(x0, ForwardSpec{*pred.conv_wlam, 1});
    return {apply_weight_param(raw_data, pred.param, WeightRole::DataFidelity),
            apply_weight_param(raw_reg, pred.param, WeightRole::Regularizer)};
}

/// Corner-aligned bilinear upsampling of y to s-times resolution. Output
/// corner samples coincide with input corner samples.
inline FeatureMap default_x0(const FeatureMap& y, std::size_t s) {
    if (s == 0) throw ContractError("default_x0: scale must be >= 1");
    if (s == 1) return y;
    const std::size_t h = y.height(), w = y.width();
    const std::size_t H = h * s, W = w * s;
    FeatureMap out(y.channels(), H, W);
    for (std::size_t c = 0; c < y.channels(); ++c) {
        for (std::size_t oy = 0; oy < H; ++oy) {
            const double sy = (H > 1 && h > 1)
                                  ? static_cast<double>(oy) * static_cast<double>(h - 1) /
                                        static_cast<double>(H - 1)
                                  : 0.0;
            const std::size_t y0 = static_cast<std::size_t>(sy);
            const std::size_t y1 = std::min(y0 + 1, h - 1);
            const double fy = sy - static_cast<double>(y0);
            for (std::size_t ox = 0; ox < W; ++ox) {
                const double sx = (W > 1 && w > 1)
                                      ? static_cast<double>(ox) * static_cast<double>(w - 1) /
                                            static_cast<double>(W - 1)
                                      : 0.0;
                const std::size_t x0i = static_cast<std::size_t>(sx);
                const std::size_t x1i = std::min(x0i + 1, w - 1);
                const double fx = sx - static_cast<double>(x0i);
                const double top = y(c, y0, x0i) * (1.0 - fx) + y(c, y0, x1i) * fx;
                const double bot = y(c, y1, x0i) * (1.0 - fx) + y(c, y1, x1i) * fx;
                out(c, oy, ox) = top * (1.0 - fy) + bot * fy;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Problem definition
// ---------------------------------------------------------------------------

/// One weighted reverse-convolution instance. w_data and w_reg store the
/// already-squared magnitudes |W|^2 and |W_lambda|^2.
struct WrcProblem {
    FeatureMap y;        ///< low-res observation, C x H/s x W/s
    ForwardSpec spec;    ///< kernel and scale
    WeightField w_data;  ///< data-fidelity weights at low resolution
    WeightField w_reg;   ///< regularizer weights at high resolution
    FeatureMap x0;       ///< prior estimate at high resolution
    double eps = kFixedEps;
};

namespace solver_detail {

inline void validate(const WrcProblem& p) {
    const std::size_t s = p.spec.s;
    if (s == 0) throw ContractError("WrcProblem: scale must be >= 1");
    if (p.eps < 0.0) throw ValidationError("WrcProblem: eps must be >= 0");
    if (p.w_data.channels() != p.y.channels() || p.w_data.height() != p.y.height() ||
        p.w_data.width() != p.y.width()) {
        throw DimensionError("WrcProblem: w_data shape must equal y shape");
    }
    if (p.x0.channels() != p.y.channels() || p.x0.height() != p.y.height() * s ||
        p.x0.width() != p.y.width() * s) {
        throw DimensionError("WrcProblem: x0 shape must equal s * (y shape)");
    }
    if (p.w_reg.channels() != p.x0.channels() || p.w_reg.height() != p.x0.height() ||
        p.w_reg.width() != p.x0.width()) {
        throw DimensionError("WrcProblem: w_reg shape must equal x0 shape");
    }
    if (p.spec.kernel.channels() != p.y.channels()) {
        throw DimensionError("WrcProblem: kernel channel count mismatch");
    }
    if (p.spec.kernel.kh() > p.x0.height() || p.spec.kernel.kw() > p.x0.width()) {
        throw DimensionError("WrcProblem: kernel larger than high-res grid");
    }
    if (p.eps == 0.0) {
        for (double v : p.w_reg.data()) {
            if (v == 0.0) {
                throw ValidationError(
                    "WrcProblem: w_reg entries must be positive when eps == 0");
            }
        }
    }
}

using cd = std::complex<double>;

// Per-channel scratch working on flat H*W buffers.
struct ChannelGrid {
    std::size_t H, W, s;
    std::size_t hl() const { return H / s; }
    std::size_t wl() const { return W / s; }
    std::size_t n() const { return H * W; }
    std::size_t nl() const { return hl() * wl(); }
};

inline std::vector<cd> fft_real(const double* x, const ChannelGrid& g) {
    std::vector<cd> buf(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) buf[i] = cd(x[i], 0.0);
    fft_detail::fft_2d(buf.data(), g.H, g.W, false);
    return buf;
}

inline void ifft_real(std::vector<cd> buf, const ChannelGrid& g, double* out,
                      double residue_tol, const char* what) {
    fft_detail::fft_2d(buf.data(), g.H, g.W, true);
    const double norm = 1.0 / static_cast<double>(g.n());
    double residue = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) {
        buf[i] *= norm;
        residue = std::max(residue, std::abs(buf[i].imag()));
        out[i] = buf[i].real();
    }
    if (residue >= residue_tol) {
        throw NumericalError(std::string(what) + ": imaginary residue " +
                             std::to_string(residue) + " exceeds tolerance");
    }
}

// coset/chunk block mean of a flat high-res buffer into a flat low-res buffer
template <typename T>
std::vector<T> block_mean_flat(const std::vector<T>& x, const ChannelGrid& g) {
    std::vector<T> out(g.nl(), T{});
    for (std::size_t i = 0; i < g.s; ++i) {
        for (std::size_t j = 0; j < g.s; ++j) {
            for (std::size_t u = 0; u < g.hl(); ++u) {
                for (std::size_t v = 0; v < g.wl(); ++v) {
                    out[u * g.wl() + v] += x[(u + i * g.hl()) * g.W + (v + j * g.wl())];
                }
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(g.s * g.s);
    for (auto& e : out) e *= inv;
    return out;
}

// Kx or K^T x through a cached OTF; real input, real output.
inline void conv_otf(const std::vector<cd>& otf, const double* x, double* out,
                     const ChannelGrid& g, bool conjugate) {
    std::vector<cd> buf = fft_real(x, g);
    if (conjugate) {
        for (std::size_t i = 0; i < g.n(); ++i) buf[i] *= std::conj(otf[i]);
    } else {
        for (std::size_t i = 0; i < g.n(); ++i) buf[i] *= otf[i];
    }
    fft_detail::fft_2d(buf.data(), g.H, g.W, true);
    const double norm = 1.0 / static_cast<double>(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) out[i] = buf[i].real() * norm;
}

/// Single-pass evaluation of the weighted closed form (the FFT formula) for
/// one channel. `wr_eff` must already include the epsilon guard. The formula
/// is exact only for constant weight fields; for varying fields the output
/// spectrum is not Hermitian, so callers pass a lenient residue tolerance and
/// treat the real part as an initial estimate.
inline void closed_form_channel(const std::vector<cd>& otf, const double* y,
                                const double* wd, const double* wr_eff,
                                const double* x0, const ChannelGrid& g, double* out,
                                double residue_tol) {
    // F_{(|W|^2 . Y) upsampled}
    std::vector<double> up(g.n(), 0.0);
    for (std::size_t u = 0; u < g.hl(); ++u) {
        for (std::size_t v = 0; v < g.wl(); ++v) {
            up[(u * g.s) * g.W + v * g.s] = wd[u * g.wl() + v] * y[u * g.wl() + v];
        }
    }
    std::vector<cd> L = fft_real(up.data(), g);
    for (std::size_t i = 0; i < g.n(); ++i) L[i] *= std::conj(otf[i]);

    // + F_{(|W_lam|^2 + eps) . X0}
    std::vector<double> wx0(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) wx0[i] = wr_eff[i] * x0[i];
    std::vector<cd> fx0 = fft_real(wx0.data(), g);
    for (std::size_t i = 0; i < g.n(); ++i) L[i] += fx0[i];

    // Q = |W|^2 . (F_K L)block-mean / (|W|^2 . |F_K|^2 block-mean + |W_lam|^2 block-mean)
    std::vector<cd> fkl(g.n());
    std::vector<double> fk2(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        fkl[i] = otf[i] * L[i];
        fk2[i] = std::norm(otf[i]);
    }
    std::vector<cd> fkl_m = block_mean_flat(fkl, g);
    std::vector<double> fk2_m = block_mean_flat(fk2, g);
    std::vector<double> wr_m =
        block_mean_flat(std::vector<double>(wr_eff, wr_eff + g.n()), g);
    std::vector<cd> q(g.nl());
    for (std::size_t i = 0; i < g.nl(); ++i) {
        q[i] = wd[i] * fkl_m[i] / (wd[i] * fk2_m[i] + wr_m[i]);
    }

    // F_out = (L - conj(F_K) . tile(Q)) / (|W_lam|^2 + eps)
    for (std::size_t yy = 0; yy < g.H; ++yy) {
        for (std::size_t xx = 0; xx < g.W; ++xx) {
            const std::size_t i = yy * g.W + xx;
            const cd tiled = q[(yy % g.hl()) * g.wl() + (xx % g.wl())];
            L[i] = (L[i] - std::conj(otf[i]) * tiled) / wr_eff[i];
        }
    }
    ifft_real(std::move(L), g, out, residue_tol, "wrc closed form");
}

/// Normal-equations matvec: (K^T S^T |W|^2 S K + |W_lam_eff|^2) x.
inline void normal_matvec(const std::vector<cd>& otf, const double* wd,
                          const double* wr_eff, const ChannelGrid& g,
                          const std::vector<double>& x, std::vector<double>& out,
                          std::vector<double>& t, std::vector<double>& u) {
    conv_otf(otf, x.data(), t.data(), g, false);
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t yy = 0; yy < g.hl(); ++yy) {
        for (std::size_t xx = 0; xx < g.wl(); ++xx) {
            const std::size_t hi = (yy * g.s) * g.W + xx * g.s;
            u[hi] = wd[yy * g.wl() + xx] * t[hi];
        }
    }
    conv_otf(otf, u.data(), out.data(), g, true);
    for (std::size_t i = 0; i < g.n(); ++i) out[i] += wr_eff[i] * x[i];
}

/// Exact inverse of the constant-weight normal matrix, used as the CG
/// preconditioner: solves (cw K^T S^T S K + cr I) z = r via the closed form.
struct ConstantPreconditioner {
    const std::vector<cd>* otf;
    std::vector<double> fk2_mean;  // block-mean of |F_K|^2
    double cw, cr;
    ChannelGrid g;

    void apply(const std::vector<double>& r, std::vector<double>& z) const {
        std::vector<cd> R = fft_real(r.data(), g);
        std::vector<cd> fkl(g.n());
        for (std::size_t i = 0; i < g.n(); ++i) fkl[i] = (*otf)[i] * R[i];
        std::vector<cd> num = block_mean_flat(fkl, g);
        for (std::size_t i = 0; i < g.nl(); ++i) {
            num[i] = cw * num[i] / (cw * fk2_mean[i] + cr);
        }
        for (std::size_t yy = 0; yy < g.H; ++yy) {
            for (std::size_t xx = 0; xx < g.W; ++xx) {
                const std::size_t i = yy * g.W + xx;
                const cd tiled = num[(yy % g.hl()) * g.wl() + (xx % g.wl())];
                R[i] = (R[i] - std::conj((*otf)[i]) * tiled) / cr;
            }
        }
        fft_detail::fft_2d(R.data(), g.H, g.W, true);
        const double norm = 1.0 / static_cast<double>(g.n());
        for (std::size_t i = 0; i < g.n(); ++i) z[i] = R[i].real() * norm;
    }
};

inline double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

/// Preconditioned CG on the weighted normal equations for one channel,
/// starting from the closed-form estimate. Refines the estimate to a true
/// stationary point of the weighted objective.
inline void refine_channel(const std::vector<cd>& otf, const double* y,
                           const double* wd, const double* wr_eff, const double* x0,
                           const ChannelGrid& g, std::vector<double>& x) {
    const std::size_t n = g.n();
    std::vector<double> b(n), t(n), u(n), r(n), z(n), p(n), ap(n);

    // b = K^T S^T (|W|^2 . y) + |W_lam_eff|^2 . x0
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t yy = 0; yy < g.hl(); ++yy) {
        for (std::size_t xx = 0; xx < g.wl(); ++xx) {
            u[(yy * g.s) * g.W + xx * g.s] =
                wd[yy * g.wl() + xx] * y[yy * g.wl() + xx];
        }
    }
    conv_otf(otf, u.data(), b.data(), g, true);
    for (std::size_t i = 0; i < n; ++i) b[i] += wr_eff[i] * x0[i];

    double cw = 0.0, cr = 0.0;
    for (std::size_t i = 0; i < g.nl(); ++i) cw += wd[i];
    for (std::size_t i = 0; i < n; ++i) cr += wr_eff[i];
    cw /= static_cast<double>(g.nl());
    cr /= static_cast<double>(n);

    std::vector<cd> fk2(n);
    for (std::size_t i = 0; i < n; ++i) fk2[i] = cd(std::norm(otf[i]), 0.0);
    std::vector<cd> fk2_mean_c = block_mean_flat(fk2, g);
    ConstantPreconditioner precond{&otf, {}, cw, cr, g};
    precond.fk2_mean.resize(g.nl());
    for (std::size_t i = 0; i < g.nl(); ++i) precond.fk2_mean[i] = fk2_mean_c[i].real();

    const double bnorm = std::max(1.0, inf_norm(b));
    const double target = 1e-13 * bnorm;
    const double accept = 1e-8 * bnorm;

    normal_matvec(otf, wd, wr_eff, g, x, ap, t, u);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];

    std::vector<double> best_x = x;
    double best_res = inf_norm(r);

    precond.apply(r, z);
    p = z;
    double rz = dot(r, z);
    const std::size_t maxit = std::max<std::size_t>(200, 4 * n);
    for (std::size_t it = 0; it < maxit && best_res > target; ++it) {
        normal_matvec(otf, wd, wr_eff, g, p, ap, t, u);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) break;  // loss of positive definiteness / breakdown
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double res = inf_norm(r);
        if (res < best_res) {
            best_res = res;
            best_x = x;
        }
        precond.apply(r, z);
        const double rz2 = dot(r, z);
        if (!(std::abs(rz2) > 0.0)) break;
        const double beta = rz2 / rz;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        rz = rz2;
    }
    x = best_x;
    if (best_res > accept) {
        throw NumericalError("wrc_solve: normal-equation residual " +
                             std::to_string(best_res) +
                             " did not reach stationarity tolerance");
    }
}

inline bool is_constant(const double* v, std::size_t n) {
    for (std::size_t i = 1; i < n; ++i) {
        if (v[i] != v[0]) return false;
    }
    return true;
}

}  // namespace solver_detail

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

/// Single-pass evaluation of the weighted closed-form FFT formula. Exact when
/// both weight fields are constant per channel; for spatially varying weights
/// it is the formula's direct reading and only approximates the minimizer
/// (see wrc_solve).
inline FeatureMap wrc_closed_form(const WrcProblem& p) {
    solver_detail::validate(p);
    const std::size_t s = p.spec.s;
    const std::size_t H = p.x0.height(), W = p.x0.width();
    solver_detail::ChannelGrid g{H, W, s};
    Spectrum otf = psf_to_otf(p.spec.kernel, H, W);
    FeatureMap out(p.y.channels(), H, W);
    std::vector<double> wr_eff(H * W);
    for (std::size_t c = 0; c < p.y.channels(); ++c) {
        const double* wr = p.w_reg.channel(c);
        for (std::size_t i = 0; i < H * W; ++i) wr_eff[i] = wr[i] + p.eps;
        const bool constant =
            solver_detail::is_constant(p.w_data.channel(c), g.nl()) &&
            solver_detail::is_constant(wr_eff.data(), H * W);
        const double tol =
            constant ? 1e-6 : std::numeric_limits<double>::infinity();
        std::vector<solver_detail::cd> otf_c(otf.channel(c), otf.channel(c) + H * W);
        solver_detail::closed_form_channel(otf_c, p.y.channel(c), p.w_data.channel(c),
                                           wr_eff.data(), p.x0.channel(c), g,
                                           out.channel(c), tol);
    }
    return out;
}

/// Solve the weighted reverse-convolution problem exactly: the minimizer of
///   ||W (Y - (X conv K) down_s)||_F^2 + ||W_lam_eff (X - X0)||_F^2
/// with W_lam_eff^2 = w_reg + eps. Channels with constant weight fields take
/// the closed-form FFT formula directly (it is exact there); spatially
/// varying channels start from the closed-form estimate and are refined to
/// stationarity by preconditioned CG with FFT matvecs.
inline FeatureMap wrc_solve(const WrcProblem& p) {
    solver_detail::validate(p);
    const std::size_t s = p.spec.s;
    const std::size_t H = p.x0.height(), W = p.x0.width();
    const std::size_t n = H * W;
    solver_detail::ChannelGrid g{H, W, s};
    Spectrum otf = psf_to_otf(p.spec.kernel, H, W);
    FeatureMap out(p.y.channels(), H, W);
    std::vector<double> wr_eff(n);
    for (std::size_t c = 0; c < p.y.channels(); ++c) {
        const double* wr = p.w_reg.channel(c);
        for (std::size_t i = 0; i < n; ++i) wr_eff[i] = wr[i] + p.eps;
        std::vector<solver_detail::cd> otf_c(otf.channel(c), otf.channel(c) + n);
        const bool constant =
            solver_detail::is_constant(p.w_data.channel(c), g.nl()) &&
            solver_detail::is_constant(wr_eff.data(), n);
        const double tol =
            constant ? 1e-6 : std::numeric_limits<double>::infinity();
        solver_detail::closed_form_channel(otf_c, p.y.channel(c), p.w_data.channel(c),
                                           wr_eff.data(), p.x0.channel(c), g,
                                           out.channel(c), tol);
        if (!constant) {
            std::vector<double> x(out.channel(c), out.channel(c) + n);
            solver_detail::refine_channel(otf_c, p.y.channel(c), p.w_data.channel(c),
                                          wr_eff.data(), p.x0.channel(c), g, x);
            std::copy(x.begin(), x.end(), out.channel(c));
        }
    }
    return out;
}

/// s=1 specialization: the elementwise inverse-filtering form, refined the
/// same way when weights vary. Agrees with wrc_solve within 1e-10.
inline FeatureMap wrc_solve_s1(const WrcProblem& p) {
    if (p.spec.s != 1) throw ContractError("wrc_solve_s1: requires s == 1");
    solver_detail::validate(p);
    const std::size_t H = p.x0.height(), W = p.x0.width();
    const std::size_t n = H * W;
    solver_detail::ChannelGrid g{H, W, 1};
    Spectrum otf = psf_to_otf(p.spec.kernel, H, W);
    FeatureMap out(p.y.channels(), H, W);
    std::vector<double> wr_eff(n);
    for (std::size_t c = 0; c < p.y.channels(); ++c) {
        const double* wr = p.w_reg.channel(c);
        const double* wd = p.w_data.channel(c);
        for (std::size_t i = 0; i < n; ++i) wr_eff[i] = wr[i] + p.eps;
        std::vector<solver_detail::cd> otf_c(otf.channel(c), otf.channel(c) + n);
        const bool constant = solver_detail::is_constant(wd, n) &&
                              solver_detail::is_constant(wr_eff.data(), n);
        const double tol =
            constant ? 1e-6 : std::numeric_limits<double>::infinity();

        // direct elementwise form:
        //   F_X = (conj(F_K) F_{|W|^2 Y} + F_{W_lam_eff X0}) / (|W|^2 |F_K|^2 + W_lam_eff)
        std::vector<double> wy(n), wx0(n);
        for (std::size_t i = 0; i < n; ++i) {
            wy[i] = wd[i] * p.y.channel(c)[i];
            wx0[i] = wr_eff[i] * p.x0.channel(c)[i];
        }
        std::vector<solver_detail::cd> num = solver_detail::fft_real(wy.data(), g);
        std::vector<solver_detail::cd> fx0 = solver_detail::fft_real(wx0.data(), g);
        for (std::size_t i = 0; i < n; ++i) {
            num[i] = (std::conj(otf_c[i]) * num[i] + fx0[i]) /
                     (wd[i] * std::norm(otf_c[i]) + wr_eff[i]);
        }
        solver_detail::ifft_real(std::move(num), g, out.channel(c), tol, "wrc_solve_s1");

        if (!constant) {
            std::vector<double> x(out.channel(c), out.channel(c) + n);
            solver_detail::refine_channel(otf_c, p.y.channel(c), wd, wr_eff.data(),
                                          p.x0.channel(c), g, x);
            std::copy(x.begin(), x.end(), out.channel(c));
        }
    }
    return out;
}

/// The unweighted reverse-convolution (Converse2D) closed form with unit data
/// weights and constant regularizer lambda.
inline FeatureMap converse2d_solve(const FeatureMap& y, const ForwardSpec& spec,
                                   double lambda, const FeatureMap& x0) {
    if (!(lambda > 0.0)) throw ContractError("converse2d_solve: lambda must be > 0");
    const std::size_t s = spec.s;
    if (x0.height() != y.height() * s || x0.width() != y.width() * s ||
        x0.channels() != y.channels()) {
        throw DimensionError("converse2d_solve: x0 shape must equal s * (y shape)");
    }
    const std::size_t H = x0.height(), W = x0.width();
    const std::size_t n = H * W;
    solver_detail::ChannelGrid g{H, W, s};
    Spectrum otf = psf_to_otf(spec.kernel, H, W);
    FeatureMap out(y.channels(), H, W);
    for (std::size_t c = 0; c < y.channels(); ++c) {
        std::vector<solver_detail::cd> otf_c(otf.channel(c), otf.channel(c) + n);
        // L = conj(F_K) F_{Y up_s} + lambda F_{X0}
        std::vector<double> up(n, 0.0);
        for (std::size_t u = 0; u < g.hl(); ++u) {
            for (std::size_t v = 0; v < g.wl(); ++v) {
                up[(u * s) * W + v * s] = y(c, u, v);
            }
        }
        std::vector<solver_detail::cd> L = solver_detail::fft_real(up.data(), g);
        std::vector<solver_detail::cd> fx0 =
            solver_detail::fft_real(x0.channel(c), g);
        for (std::size_t i = 0; i < n; ++i) {
            L[i] = std::conj(otf_c[i]) * L[i] + lambda * fx0[i];
        }
        std::vector<solver_detail::cd> fkl(n);
        std::vector<solver_detail::cd> fk2(n);
        for (std::size_t i = 0; i < n; ++i) {
            fkl[i] = otf_c[i] * L[i];
            fk2[i] = solver_detail::cd(std::norm(otf_c[i]), 0.0);
        }
        auto fkl_m = solver_detail::block_mean_flat(fkl, g);
        auto fk2_m = solver_detail::block_mean_flat(fk2, g);
        for (std::size_t i = 0; i < g.nl(); ++i) {
            fkl_m[i] /= (fk2_m[i].real() + lambda);
        }
        for (std::size_t yy = 0; yy < H; ++yy) {
            for (std::size_t xx = 0; xx < W; ++xx) {
                const std::size_t i = yy * W + xx;
                const auto tiled = fkl_m[(yy % g.hl()) * g.wl() + (xx % g.wl())];
                L[i] = (L[i] - std::conj(otf_c[i]) * tiled) / lambda;
            }
        }
        solver_detail::ifft_real(std::move(L), g, out.channel(c), 1e-6,
                                 "converse2d_solve");
    }
    return out;
}

/// Weighted objective value at x:
///   sum |W|^2 (Y - forward(x))^2 + sum |W_lam|^2 (x - x0)^2.
/// The stored fields are the squared weights; no further squaring occurs and
/// the epsilon guard is not included.
inline double objective_value(const WrcProblem& p, const FeatureMap& x) {
    if (!x.same_shape(p.x0)) throw DimensionError("objective_value: x shape mismatch");
    FeatureMap fwd = forward_spatial(x, p.spec);
    double acc = 0.0;
    for (std::size_t i = 0; i < fwd.size(); ++i) {
        const double r = p.y.data()[i] - fwd.data()[i];
        acc += p.w_data.data()[i] * r * r;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = x.data()[i] - p.x0.data()[i];
        acc += p.w_reg.data()[i] * r * r;
    }
    return acc;
}

/// Analytic gradient of objective_value at x:
///   2 K^T S^T |W|^2 (S K x - Y) + 2 |W_lam|^2 (x - x0).
inline FeatureMap objective_gradient(const WrcProblem& p, const FeatureMap& x) {
    if (!x.same_shape(p.x0)) throw DimensionError("objective_gradient: x shape mismatch");
    const std::size_t s = p.spec.s;
    const std::size_t H = x.height(), W = x.width();
    const std::size_t n = H * W;
    solver_detail::ChannelGrid g{H, W, s};
    Spectrum otf = psf_to_otf(p.spec.kernel, H, W);
    FeatureMap grad(x.channels(), H, W);
    std::vector<double> t(n), u(n), v(n);
    for (std::size_t c = 0; c < x.channels(); ++c) {
        std::vector<solver_detail::cd> otf_c(otf.channel(c), otf.channel(c) + n);
        solver_detail::conv_otf(otf_c, x.channel(c), t.data(), g, false);
        std::fill(u.begin(), u.end(), 0.0);
        for (std::size_t yy = 0; yy < g.hl(); ++yy) {
            for (std::size_t xx = 0; xx < g.wl(); ++xx) {
                const std::size_t hi = (yy * s) * W + xx * s;
                const std::size_t lo = yy * g.wl() + xx;
                u[hi] = p.w_data.channel(c)[lo] * (t[hi] - p.y.channel(c)[lo]);
            }
        }
        solver_detail::conv_otf(otf_c, u.data(), v.data(), g, true);
        for (std::size_t i = 0; i < n; ++i) {
            grad.channel(c)[i] =
                2.0 * v[i] +
                2.0 * p.w_reg.channel(c)[i] * (x.channel(c)[i] - p.x0.channel(c)[i]);
        }
    }
    return grad;
}

}  // namespace wrc
