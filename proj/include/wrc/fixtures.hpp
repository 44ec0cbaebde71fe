#pragma once

#include <cstdint>
#include <cstddef>

#include "wrc/rng.hpp"
#include "wrc/solver.hpp"
#include "wrc/tensor.hpp"

namespace wrc {

// Deterministic fixture generation shared by the CLI verification suites and
// the test binaries. Everything flows through SplitMix64 so a recorded seed
// reproduces a problem bit-exactly.

struct FixtureSpec {
    std::size_t channels = 1;
    std::size_t H = 8, W = 8;  // high-res grid
    std::size_t s = 2;
    std::size_t kernel_size = 3;
    double w_lo = 0.5, w_hi = 2.0;      // data-fidelity weight range
    double wl_lo = 0.05, wl_hi = 0.5;   // regularizer weight range
    double eps = 0.0;
    std::uint64_t seed = 1;
};

/// Random strictly-positive-weight problem with a bilinear prior.
inline WrcProblem make_random_problem(const FixtureSpec& f) {
    SplitMix64 rng(f.seed);
    const std::size_t h = f.H / f.s, w = f.W / f.s;
    Kernel k(f.channels, f.kernel_size, f.kernel_size,
             rng.normal_vector(f.channels * f.kernel_size * f.kernel_size),
             f.kernel_size / 2, f.kernel_size / 2);
    FeatureMap y(f.channels, h, w, rng.normal_vector(f.channels * h * w));
    WeightField wd(f.channels, h, w,
                   rng.uniform_vector(f.channels * h * w, f.w_lo, f.w_hi),
                   WeightRole::DataFidelity);
    WeightField wr(f.channels, f.H, f.W,
                   rng.uniform_vector(f.channels * f.H * f.W, f.wl_lo, f.wl_hi),
                   WeightRole::Regularizer);
    FeatureMap x0 = default_x0(y, f.s);
    return WrcProblem{std::move(y), ForwardSpec{std::move(k), f.s}, std::move(wd),
                      std::move(wr), std::move(x0), f.eps};
}

}  // namespace wrc
