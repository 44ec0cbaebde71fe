#pragma once

#include <cstddef>

#include "wrc/errors.hpp"
#include "wrc/fft.hpp"
#include "wrc/fft_ops.hpp"
#include "wrc/tensor.hpp"

namespace wrc {

/// The degradation operator Y = (X (*) K) downsampled by s, with circular
/// boundary conditions. Depthwise: each channel is convolved with its own
/// kernel slice.
struct ForwardSpec {
    Kernel kernel;
    std::size_t s = 1;
};

namespace detail {

inline void check_forward_shapes(const FeatureMap& x, const ForwardSpec& spec) {
    if (spec.kernel.channels() != x.channels()) {
        throw DimensionError("forward: kernel channel count mismatch");
    }
    if (spec.kernel.kh() > x.height() || spec.kernel.kw() > x.width()) {
        throw DimensionError("forward: kernel larger than input");
    }
    require_divisible(x.height(), x.width(), spec.s, "forward");
}

}  // namespace detail

/// Spatial-domain reference path: true circular convolution (kernel flipped
/// relative to correlation) followed by stride-s decimation at block
/// position (0,0).
inline FeatureMap forward_spatial(const FeatureMap& x, const ForwardSpec& spec) {
    detail::check_forward_shapes(x, spec);
    const std::size_t H = x.height(), W = x.width(), s = spec.s;
    const Kernel& k = spec.kernel;
    FeatureMap out(x.channels(), H / s, W / s);
    for (std::size_t c = 0; c < x.channels(); ++c) {
        for (std::size_t u = 0; u < H / s; ++u) {
            for (std::size_t v = 0; v < W / s; ++v) {
                double acc = 0.0;
                for (std::size_t i = 0; i < k.kh(); ++i) {
                    for (std::size_t j = 0; j < k.kw(); ++j) {
                        // embedded PSF offset of tap (i,j)
                        const std::size_t dy = (i + H - k.origin_y()) % H;
                        const std::size_t dx = (j + W - k.origin_x()) % W;
                        const std::size_t sy = (u * s + H - dy) % H;
                        const std::size_t sx = (v * s + W - dx) % W;
                        acc += k(c, i, j) * x(c, sy, sx);
                    }
                }
                out(c, u, v) = acc;
            }
        }
    }
    return out;
}

/// Spectral path: ifft2(F_K . fft2(x)) then decimation. Agrees with
/// forward_spatial within 1e-10 by the circular convolution theorem.
inline FeatureMap forward_spectral(const FeatureMap& x, const ForwardSpec& spec) {
    detail::check_forward_shapes(x, spec);
    const std::size_t s = spec.s;
    Spectrum otf = psf_to_otf(spec.kernel, x.height(), x.width());
    Spectrum fx = fft2(x);
    for (std::size_t i = 0; i < fx.size(); ++i) fx.data()[i] *= otf.data()[i];
    FeatureMap conv = ifft2(fx, 1e-6);
    if (s == 1) return conv;
    FeatureMap out(x.channels(), x.height() / s, x.width() / s);
    for (std::size_t c = 0; c < x.channels(); ++c) {
        for (std::size_t u = 0; u < out.height(); ++u) {
            for (std::size_t v = 0; v < out.width(); ++v) {
                out(c, u, v) = conv(c, u * s, v * s);
            }
        }
    }
    return out;
}

}  // namespace wrc
