#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wrc/dense_oracle.hpp"
#include "wrc/errors.hpp"
#include "wrc/rng.hpp"
#include "wrc/solver.hpp"
#include "wrc/tensor.hpp"

namespace wrc {

// Timing harness: FFT closed form vs dense oracle across sizes. Every
// configuration passes a correctness gate before any timing is recorded.

struct BenchCase {
    std::string name;
    std::size_t channels = 1;
    std::size_t H = 16, W = 16;
    std::size_t s = 2;
    std::size_t kernel_size = 3;
    std::size_t repeats = 5;
    std::uint64_t seed = 1;
    bool include_dense = true;
    std::size_t warmup = 2;
};

struct PathTiming {
    std::int64_t median_ns = 0;
    std::int64_t min_ns = 0;
};

struct BenchResult {
    BenchCase config;
    PathTiming fft;
    PathTiming dense;  // valid only when include_dense
};

namespace bench_detail {

/// Deterministic problem from the case seed. Weights are constant (unit data
/// fidelity, fixed regularizer), so the closed-form FFT path is what gets
/// timed and the reduction identity doubles as the correctness gate.
inline WrcProblem make_problem(const BenchCase& c) {
    if (c.repeats < 3) throw ContractError("bench: repeats must be >= 3");
    if (c.H % c.s != 0 || c.W % c.s != 0) {
        throw DimensionError("bench: s must divide H and W");
    }
    SplitMix64 rng(c.seed);
    const std::size_t h = c.H / c.s, w = c.W / c.s;
    Kernel k(c.channels, c.kernel_size, c.kernel_size,
             rng.normal_vector(c.channels * c.kernel_size * c.kernel_size),
             c.kernel_size / 2, c.kernel_size / 2);
    FeatureMap y(c.channels, h, w, rng.normal_vector(c.channels * h * w));
    FeatureMap x0 = default_x0(y, c.s);
    const double lambda = 0.1;
    return WrcProblem{
        std::move(y),
        ForwardSpec{std::move(k), c.s},
        WeightField::constant(c.channels, h, w, 1.0, WeightRole::DataFidelity),
        WeightField::constant(c.channels, c.H, c.W, lambda, WeightRole::Regularizer),
        std::move(x0),
        0.0};
}

inline std::int64_t median_of(std::vector<std::int64_t> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

template <typename F>
PathTiming time_path(F&& body, std::size_t warmup, std::size_t repeats) {
    for (std::size_t i = 0; i < warmup; ++i) body();
    std::vector<std::int64_t> samples;
    samples.reserve(repeats);
    for (std::size_t i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        const auto t1 = std::chrono::steady_clock::now();
        samples.push_back(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    }
    PathTiming t;
    t.min_ns = *std::min_element(samples.begin(), samples.end());
    t.median_ns = median_of(std::move(samples));
    return t;
}

}  // namespace bench_detail

/// Run one benchmark case. The correctness gate (solver vs reduction
/// identity, and vs the dense oracle when the dense path is enabled) runs
/// before timing begins and throws on failure.
inline BenchResult run_bench(const BenchCase& c) {
    if (c.include_dense && c.H * c.W > kDenseCapacity) {
        throw CapacityError("bench: dense path capped at H*W <= " +
                            std::to_string(kDenseCapacity));
    }
    WrcProblem p = bench_detail::make_problem(c);

    // correctness gate: constant weights reduce to the converse2d form
    FeatureMap solved = wrc_solve(p);
    const double lambda = p.w_reg.data()[0];
    FeatureMap reference = converse2d_solve(p.y, p.spec, lambda, p.x0);
    for (std::size_t i = 0; i < solved.size(); ++i) {
        if (std::abs(solved.data()[i] - reference.data()[i]) > 1e-8) {
            throw NumericalError("bench: correctness gate failed (reduction identity)");
        }
    }
    std::vector<DenseProblem> dense_problems;
    if (c.include_dense) {
        for (std::size_t ch = 0; ch < c.channels; ++ch) {
            dense_problems.push_back(assemble(p, ch));
            Eigen::VectorXd x = dense_solve(dense_problems.back());
            for (std::size_t i = 0; i < p.x0.height() * p.x0.width(); ++i) {
                const double ref = x(static_cast<Eigen::Index>(i));
                if (std::abs(solved.channel(ch)[i] - ref) / (1.0 + std::abs(ref)) > 1e-6) {
                    throw NumericalError("bench: correctness gate failed (dense oracle)");
                }
            }
        }
    }

    BenchResult result;
    result.config = c;
    result.fft = bench_detail::time_path([&] { (void)wrc_solve(p); }, c.warmup, c.repeats);
    if (c.include_dense) {
        result.dense = bench_detail::time_path(
            [&] {
                for (const auto& d : dense_problems) (void)dense_solve(d);
            },
            c.warmup, c.repeats);
    }
    return result;
}

/// Machine-readable output, one line per path:
/// `bench case=<name> path=<fft|dense> n=<HW> median_ns=<int> min_ns=<int>`
inline std::vector<std::string> format_bench_lines(const BenchResult& r) {
    const std::size_t n = r.config.H * r.config.W;
    std::vector<std::string> lines;
    lines.push_back("bench case=" + r.config.name + " path=fft n=" + std::to_string(n) +
                    " median_ns=" + std::to_string(r.fft.median_ns) +
                    " min_ns=" + std::to_string(r.fft.min_ns));
    if (r.config.include_dense) {
        lines.push_back("bench case=" + r.config.name + " path=dense n=" +
                        std::to_string(n) + " median_ns=" + std::to_string(r.dense.median_ns) +
                        " min_ns=" + std::to_string(r.dense.min_ns));
    }
    return lines;
}

/// Least-squares slope of log(median_ns) against log(n).
inline double loglog_slope(const std::vector<std::pair<std::size_t, std::int64_t>>& pts) {
    if (pts.size() < 2) throw ContractError("loglog_slope: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, t] : pts) {
        const double x = std::log(static_cast<double>(n));
        const double y = std::log(static_cast<double>(t));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(pts.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace wrc
