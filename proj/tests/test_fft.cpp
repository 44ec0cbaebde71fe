#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "wrc/fft.hpp"
#include "wrc/rng.hpp"
#include "wrc/tensor.hpp"

namespace {

using cd = std::complex<double>;

// independent O(N^2) oracle: direct 2-D DFT by definition
wrc::Spectrum naive_dft2(const wrc::FeatureMap& x) {
    const std::size_t H = x.height(), W = x.width();
    wrc::Spectrum out(x.channels(), H, W);
    for (std::size_t c = 0; c < x.channels(); ++c) {
        for (std::size_t ky = 0; ky < H; ++ky) {
            for (std::size_t kx = 0; kx < W; ++kx) {
                cd acc(0.0, 0.0);
                for (std::size_t y = 0; y < H; ++y) {
                    for (std::size_t xx = 0; xx < W; ++xx) {
                        const double ang =
                            -2.0 * std::numbers::pi *
                            (double(ky * y) / double(H) + double(kx * xx) / double(W));
                        acc += x(c, y, xx) * cd(std::cos(ang), std::sin(ang));
                    }
                }
                out(c, ky, kx) = acc;
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("fft2 matches the direct DFT oracle on mixed sizes") {
    wrc::SplitMix64 rng(101);
    const std::size_t sizes[][2] = {{4, 4}, {6, 6}, {8, 8}, {10, 12},
                                    {5, 7}, {12, 6}, {16, 16}, {1, 9}};
    for (auto [H, W] : sizes) {
        wrc::FeatureMap x(1, H, W, rng.normal_vector(H * W));
        wrc::Spectrum fast = wrc::fft2(x);
        wrc::Spectrum slow = naive_dft2(x);
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < fast.size(); ++i) {
            err = std::max(err, std::abs(fast.data()[i] - slow.data()[i]));
            scale = std::max(scale, std::abs(slow.data()[i]));
        }
        INFO("size " << H << "x" << W);
        REQUIRE(err < 1e-10 * (1.0 + scale));
    }
}

TEST_CASE("ifft2 inverts fft2") {
    wrc::SplitMix64 rng(5);
    for (std::size_t n : {4u, 6u, 9u, 12u, 16u}) {
        wrc::FeatureMap x(2, n, n, rng.normal_vector(2 * n * n));
        wrc::FeatureMap back = wrc::ifft2(wrc::fft2(x), 1e-8);
        for (std::size_t i = 0; i < x.size(); ++i) {
            REQUIRE(std::abs(back.data()[i] - x.data()[i]) < 1e-11);
        }
    }
}

TEST_CASE("fft2 is linear and satisfies Parseval") {
    wrc::SplitMix64 rng(77);
    const std::size_t n = 12;
    wrc::FeatureMap a(1, n, n, rng.normal_vector(n * n));
    wrc::FeatureMap b(1, n, n, rng.normal_vector(n * n));
    wrc::FeatureMap sum(1, n, n);
    for (std::size_t i = 0; i < sum.size(); ++i) {
        sum.data()[i] = 2.0 * a.data()[i] - 3.0 * b.data()[i];
    }
    wrc::Spectrum fa = wrc::fft2(a), fb = wrc::fft2(b), fs = wrc::fft2(sum);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        REQUIRE(std::abs(fs.data()[i] - (2.0 * fa.data()[i] - 3.0 * fb.data()[i])) <
                1e-10);
    }
    double spatial = 0.0, spectral = 0.0;
    for (double v : a.data()) spatial += v * v;
    for (const auto& v : fa.data()) spectral += std::norm(v);
    REQUIRE(std::abs(spatial - spectral / double(n * n)) < 1e-9 * (1.0 + spatial));
}

TEST_CASE("delta input gives a flat spectrum") {
    wrc::FeatureMap x(1, 8, 8);
    x(0, 0, 0) = 1.0;
    wrc::Spectrum s = wrc::fft2(x);
    for (const auto& v : s.data()) {
        REQUIRE(std::abs(v - cd(1.0, 0.0)) < 1e-12);
    }
}

TEST_CASE("ifft2 rejects spectra with large imaginary residue") {
    wrc::Spectrum s(1, 4, 4);
    s(0, 1, 0) = cd(1.0, 0.0);  // not conjugate-symmetric
    REQUIRE_THROWS_AS(wrc::ifft2(s, 1e-8), wrc::NumericalError);
}
