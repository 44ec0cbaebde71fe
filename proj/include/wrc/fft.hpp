#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "wrc/errors.hpp"
#include "wrc/tensor.hpp"

namespace wrc {

// Complex-to-complex FFT, any composite length. Power-of-two lengths use an
// iterative radix-2 Cooley-Tukey; other lengths go through Bluestein's chirp-z
// transform, which reduces to power-of-two FFTs and keeps O(N log N) scaling.
//
// Convention: unnormalized forward transform, 1/N inverse.

namespace fft_detail {

using cd = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void fft_pow2(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang =
            (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const cd wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cd u = a[i + j];
                cd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

inline void fft_bluestein(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;

    // chirp: w_k = exp(-i*pi*k^2/n) for forward, conjugate for inverse
    std::vector<cd> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the phase argument small for large k
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang =
            (inverse ? 1.0 : -1.0) * std::numbers::pi * static_cast<double>(k2) /
            static_cast<double>(n);
        chirp[k] = cd(std::cos(ang), std::sin(ang));
    }

    std::vector<cd> fa(m, cd(0, 0)), fb(m, cd(0, 0));
    for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * chirp[k];
    fb[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
        fb[k] = fb[m - k] = std::conj(chirp[k]);
    }
    fft_pow2(fa, false);
    fft_pow2(fb, false);
    for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
    fft_pow2(fa, true);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = fa[k] * inv_m * chirp[k];
}

/// In-place 1-D transform; no normalization in either direction.
inline void fft_1d(std::vector<cd>& a, bool inverse) {
    if (a.size() <= 1) return;
    if (is_pow2(a.size())) {
        fft_pow2(a, inverse);
    } else {
        fft_bluestein(a, inverse);
    }
}

/// 2-D transform of one H x W channel, in place, unnormalized.
inline void fft_2d(cd* data, std::size_t height, std::size_t width, bool inverse) {
    std::vector<cd> buf(std::max(height, width));
    for (std::size_t y = 0; y < height; ++y) {
        buf.assign(data + y * width, data + (y + 1) * width);
        fft_1d(buf, inverse);
        std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(width),
                  data + y * width);
    }
    for (std::size_t x = 0; x < width; ++x) {
        buf.resize(height);
        for (std::size_t y = 0; y < height; ++y) buf[y] = data[y * width + x];
        fft_1d(buf, inverse);
        for (std::size_t y = 0; y < height; ++y) data[y * width + x] = buf[y];
    }
}

}  // namespace fft_detail

/// Unnormalized forward 2-D DFT per channel.
inline Spectrum fft2(const FeatureMap& x) {
    Spectrum s(x.channels(), x.height(), x.width());
    for (std::size_t c = 0; c < x.channels(); ++c) {
        auto* out = s.channel(c);
        const double* in = x.channel(c);
        const std::size_t n = x.height() * x.width();
        for (std::size_t i = 0; i < n; ++i) out[i] = fft_detail::cd(in[i], 0.0);
        fft_detail::fft_2d(out, x.height(), x.width(), false);
    }
    return s;
}

inline Spectrum fft2(const Spectrum& x) {
    Spectrum s = x;
    for (std::size_t c = 0; c < s.channels(); ++c) {
        fft_detail::fft_2d(s.channel(c), s.height(), s.width(), false);
    }
    return s;
}

/// Inverse 2-D DFT with 1/(H*W) normalization, keeping the complex result.
inline Spectrum ifft2_complex(const Spectrum& s) {
    Spectrum out = s;
    const double norm = 1.0 / static_cast<double>(s.height() * s.width());
    for (std::size_t c = 0; c < out.channels(); ++c) {
        fft_detail::fft_2d(out.channel(c), out.height(), out.width(), true);
        auto* d = out.channel(c);
        const std::size_t n = out.height() * out.width();
        for (std::size_t i = 0; i < n; ++i) d[i] *= norm;
    }
    return out;
}

/// Inverse 2-D DFT returning a real tensor. The imaginary residue is discarded
/// only after asserting max |imag| < residue_tol.
inline FeatureMap ifft2(const Spectrum& s, double residue_tol = 1e-8) {
    Spectrum c = ifft2_complex(s);
    double residue = 0.0;
    for (const auto& v : c.data()) residue = std::max(residue, std::abs(v.imag()));
    if (residue >= residue_tol) {
        throw NumericalError("ifft2: imaginary residue " + std::to_string(residue) +
                             " exceeds tolerance");
    }
    FeatureMap out(s.channels(), s.height(), s.width());
    for (std::size_t i = 0; i < c.data().size(); ++i) out.data()[i] = c.data()[i].real();
    return out;
}

}  // namespace wrc
