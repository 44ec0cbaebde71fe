#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace wrc {

/// SplitMix64 generator. One named deterministic generator drives all
/// stochastic fixture generation so recorded seeds reproduce bit-exactly.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    /// Standard normal via Box-Muller.
    double next_normal() {
        double u1 = next_unit();
        double u2 = next_unit();
        while (u1 <= 0.0) u1 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::vector<double> normal_vector(std::size_t n) {
        std::vector<double> v(n);
        for (auto& e : v) e = next_normal();
        return v;
    }

    std::vector<double> uniform_vector(std::size_t n, double lo, double hi) {
        std::vector<double> v(n);
        for (auto& e : v) e = next_uniform(lo, hi);
        return v;
    }

private:
    std::uint64_t state_;
};

}  // namespace wrc
