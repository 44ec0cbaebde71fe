#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "wrc/errors.hpp"
#include "wrc/fft.hpp"
#include "wrc/tensor.hpp"

namespace wrc {

namespace detail {

inline void require_divisible(std::size_t h, std::size_t w, std::size_t s,
                              const char* what) {
    if (s == 0) throw ContractError(std::string(what) + ": scale must be >= 1");
    if (h % s != 0 || w % s != 0) {
        throw DimensionError(std::string(what) + ": H and W must be divisible by s");
    }
}

}  // namespace detail

/// Embed a kernel into an H x W zero canvas, circularly shifted so that the
/// origin tap lands at index (0,0), then FFT. The result is the OTF F_K.
inline Spectrum psf_to_otf(const Kernel& k, std::size_t height, std::size_t width) {
    if (k.kh() > height || k.kw() > width) {
        throw DimensionError("psf_to_otf: kernel larger than target");
    }
    FeatureMap canvas(k.channels(), height, width);
    for (std::size_t c = 0; c < k.channels(); ++c) {
        for (std::size_t i = 0; i < k.kh(); ++i) {
            for (std::size_t j = 0; j < k.kw(); ++j) {
                const std::size_t y = (i + height - k.origin_y()) % height;
                const std::size_t x = (j + width - k.origin_x()) % width;
                canvas(c, y, x) = k(c, i, j);
            }
        }
    }
    return fft2(canvas);
}

/// s-fold zero-insertion upsampling; the retained sample sits at block
/// position (0,0).
inline FeatureMap upsample_zero_insert(const FeatureMap& y, std::size_t s) {
    if (s == 0) throw ContractError("upsample_zero_insert: scale must be >= 1");
    if (s == 1) return y;
    FeatureMap out(y.channels(), y.height() * s, y.width() * s);
    for (std::size_t c = 0; c < y.channels(); ++c) {
        for (std::size_t v = 0; v < y.height(); ++v) {
            for (std::size_t u = 0; u < y.width(); ++u) {
                out(c, v * s, u * s) = y(c, v, u);
            }
        }
    }
    return out;
}

namespace detail {

// Distinct-block mean over the s x s grid of contiguous H/s x W/s chunks. On a
// frequency grid the chunks are exactly the s^2 cosets of indices congruent
// mod H/s, which is the convention Eq-level block operators rely on.
template <typename Tensor>
Tensor block_mean_impl(const Tensor& x, std::size_t s, const char* what) {
    require_divisible(x.height(), x.width(), s, what);
    if (s == 1) return x;
    const std::size_t hl = x.height() / s;
    const std::size_t wl = x.width() / s;
    Tensor out(x.channels(), hl, wl);
    const double inv = 1.0 / static_cast<double>(s * s);
    for (std::size_t c = 0; c < x.channels(); ++c) {
        for (std::size_t i = 0; i < s; ++i) {
            for (std::size_t j = 0; j < s; ++j) {
                for (std::size_t u = 0; u < hl; ++u) {
                    for (std::size_t v = 0; v < wl; ++v) {
                        out(c, u, v) += x(c, u + i * hl, v + j * wl);
                    }
                }
            }
        }
    }
    for (auto& e : out.data()) e *= inv;
    return out;
}

}  // namespace detail

/// Distinct-block downsampling (the paper-level block-mean operator) on a
/// complex tensor.
inline Spectrum block_mean_downsample(const Spectrum& x, std::size_t s) {
    return detail::block_mean_impl(x, s, "block_mean_downsample");
}

/// Same block-mean on a real tensor (Algorithm-style splits of spatial maps).
inline FeatureMap block_mean_downsample(const FeatureMap& x, std::size_t s) {
    return detail::block_mean_impl(x, s, "block_mean_downsample");
}

/// Block-broadcast multiplication: the low-res tensor a is tiled s x s and
/// multiplied elementwise with the high-res tensor b.
inline Spectrum block_broadcast_multiply(const Spectrum& a, const Spectrum& b,
                                         std::size_t s) {
    if (b.height() != a.height() * s || b.width() != a.width() * s ||
        a.channels() != b.channels()) {
        throw DimensionError("block_broadcast_multiply: shape(b) must be s*shape(a)");
    }
    const std::size_t hl = a.height();
    const std::size_t wl = a.width();
    Spectrum out(b.channels(), b.height(), b.width());
    for (std::size_t c = 0; c < b.channels(); ++c) {
        for (std::size_t y = 0; y < b.height(); ++y) {
            for (std::size_t x = 0; x < b.width(); ++x) {
                out(c, y, x) = a(c, y % hl, x % wl) * b(c, y, x);
            }
        }
    }
    return out;
}

/// Tile a low-res complex tensor s x s (the repeat step of the block ops).
inline Spectrum tile(const Spectrum& a, std::size_t s) {
    Spectrum out(a.channels(), a.height() * s, a.width() * s);
    for (std::size_t c = 0; c < a.channels(); ++c) {
        for (std::size_t y = 0; y < out.height(); ++y) {
            for (std::size_t x = 0; x < out.width(); ++x) {
                out(c, y, x) = a(c, y % a.height(), x % a.width());
            }
        }
    }
    return out;
}

}  // namespace wrc
