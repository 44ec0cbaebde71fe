#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "wrc/dense_oracle.hpp"
#include "wrc/fixtures.hpp"
#include "wrc/forward.hpp"
#include "wrc/rng.hpp"

TEST_CASE("delta kernel at s=1 is the identity") {
    wrc::SplitMix64 rng(1);
    wrc::FeatureMap x(2, 5, 7, rng.normal_vector(70));
    wrc::FeatureMap y = wrc::forward_spatial(x, {wrc::Kernel::delta(2), 1});
    REQUIRE(y.data() == x.data());
}

TEST_CASE("delta kernel at s=2 decimates at block position (0,0)") {
    wrc::SplitMix64 rng(2);
    wrc::FeatureMap x(1, 6, 8, rng.normal_vector(48));
    wrc::FeatureMap y = wrc::forward_spatial(x, {wrc::Kernel::delta(1), 2});
    REQUIRE(y.height() == 3);
    REQUIRE(y.width() == 4);
    for (std::size_t u = 0; u < 3; ++u) {
        for (std::size_t v = 0; v < 4; ++v) {
            REQUIRE(y(0, u, v) == x(0, 2 * u, 2 * v));
        }
    }
}

TEST_CASE("hand-computed 1-D style circular convolution") {
    // 1x1x4 signal [1,0,0,0], kernel [a,b,c] centered (origin index 1):
    // output[v] = sum_j k[j] x[(v - (j - 1)) mod 4]
    wrc::FeatureMap x(1, 1, 4, {1.0, 0.0, 0.0, 0.0});
    wrc::Kernel k(1, 1, 3, {2.0, 5.0, 11.0}, 0, 1);
    wrc::FeatureMap y = wrc::forward_spatial(x, {k, 1});
    REQUIRE(y(0, 0, 0) == Catch::Approx(5.0).margin(1e-14));
    REQUIRE(y(0, 0, 1) == Catch::Approx(11.0).margin(1e-14));
    REQUIRE(y(0, 0, 2) == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(y(0, 0, 3) == Catch::Approx(2.0).margin(1e-14));
}

TEST_CASE("spatial and spectral forward paths agree") {
    wrc::SplitMix64 rng(42);
    const std::size_t sizes[] = {4, 6, 8, 10, 12};
    for (std::size_t n : sizes) {
        for (std::size_t s : {std::size_t{1}, std::size_t{2}}) {
            if (n % s != 0) continue;
            wrc::FeatureMap x(2, n, n, rng.normal_vector(2 * n * n));
            wrc::Kernel k(2, 3, 3, rng.normal_vector(18), 1, 1);
            wrc::FeatureMap a = wrc::forward_spatial(x, {k, s});
            wrc::FeatureMap b = wrc::forward_spectral(x, {k, s});
            double err = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                err = std::max(err, std::abs(a.data()[i] - b.data()[i]));
            }
            INFO("n=" << n << " s=" << s);
            REQUIRE(err < 1e-10);
        }
    }
}

TEST_CASE("forward matches the dense operator A = a_down * a_conv") {
    wrc::FixtureSpec f;
    f.H = f.W = 8;
    f.s = 2;
    f.kernel_size = 3;
    f.seed = 9;
    wrc::WrcProblem p = wrc::make_random_problem(f);
    wrc::DenseProblem d = wrc::assemble(p, 0);

    wrc::SplitMix64 rng(10);
    wrc::FeatureMap x(1, 8, 8, rng.normal_vector(64));
    Eigen::VectorXd xv(64);
    for (int i = 0; i < 64; ++i) xv(i) = x.data()[std::size_t(i)];
    Eigen::VectorXd yv = d.a_down * (d.a_conv * xv);
    wrc::FeatureMap y = wrc::forward_spatial(x, p.spec);
    for (int i = 0; i < yv.size(); ++i) {
        REQUIRE(std::abs(yv(i) - y.data()[std::size_t(i)]) < 1e-12);
    }
}

TEST_CASE("forward shape validation") {
    wrc::FeatureMap x(1, 6, 6);
    wrc::Kernel k = wrc::Kernel::delta(2);
    REQUIRE_THROWS_AS(wrc::forward_spatial(x, {k, 1}), wrc::DimensionError);
    REQUIRE_THROWS_AS(wrc::forward_spatial(x, {wrc::Kernel::delta(1), 4}),
                      wrc::DimensionError);
    wrc::Kernel big(1, 7, 7, std::vector<double>(49, 0.0), 3, 3);
    REQUIRE_THROWS_AS(wrc::forward_spatial(x, {big, 1}), wrc::DimensionError);
}
