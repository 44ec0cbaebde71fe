#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wrc/losses.hpp"
#include "wrc/rng.hpp"

namespace {

// independent per-location loop oracle
double loss_oracle(const wrc::FeatureMap& a, const wrc::FeatureMap& b) {
    double cos_sum = 0.0;
    for (std::size_t y = 0; y < a.height(); ++y) {
        for (std::size_t x = 0; x < a.width(); ++x) {
            double dot = 0.0, na = 0.0, nb = 0.0;
            for (std::size_t c = 0; c < a.channels(); ++c) {
                dot += a(c, y, x) * b(c, y, x);
                na += a(c, y, x) * a(c, y, x);
                nb += b(c, y, x) * b(c, y, x);
            }
            if (na > 0.0 && nb > 0.0) cos_sum += dot / (std::sqrt(na) * std::sqrt(nb));
        }
    }
    double l2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        l2 += d * d;
    }
    return 1.0 - cos_sum / double(a.height() * a.width()) + std::sqrt(l2);
}

}  // namespace

TEST_CASE("cosine_l2_loss matches the loop oracle") {
    wrc::SplitMix64 rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t c = 1 + rng.next_u64() % 4;
        const std::size_t h = 1 + rng.next_u64() % 6;
        const std::size_t w = 1 + rng.next_u64() % 6;
        wrc::FeatureMap a(c, h, w, rng.normal_vector(c * h * w));
        wrc::FeatureMap b(c, h, w, rng.normal_vector(c * h * w));
        wrc::LossValue got = wrc::cosine_l2_loss(a, b);
        const double want = loss_oracle(a, b);
        REQUIRE(std::abs(got.value - want) < 1e-10 * (1.0 + std::abs(want)));
        REQUIRE(got.zero_pair_warnings == 0);
    }
}

TEST_CASE("identity pairs score exactly zero") {
    wrc::SplitMix64 rng(32);
    wrc::FeatureMap a(3, 4, 5, rng.normal_vector(60));
    wrc::LossValue v = wrc::cosine_l2_loss(a, a);
    REQUIRE(v.value == 0.0);
    REQUIRE(v.zero_pair_warnings == 0);
}

TEST_CASE("zero-vector locations are counted and scored as dissimilar") {
    wrc::FeatureMap a(2, 1, 2, {0.0, 1.0, 0.0, 1.0});  // location 0 is the zero vector
    wrc::FeatureMap b(2, 1, 2, {0.0, 1.0, 0.0, 1.0});
    wrc::LossValue v = wrc::cosine_l2_loss(a, b);
    REQUIRE(v.zero_pair_warnings == 1);
    // cosine term: location 0 contributes 0, location 1 contributes 1
    REQUIRE(v.value == Catch::Approx(1.0 - 0.5).margin(1e-14));

    // one-sided zero vector: no warning, cosine contribution 0
    wrc::FeatureMap c(2, 1, 1, {0.0, 0.0});
    wrc::FeatureMap d(2, 1, 1, {3.0, 4.0});
    wrc::LossValue u = wrc::cosine_l2_loss(c, d);
    REQUIRE(u.zero_pair_warnings == 0);
    REQUIRE(u.value == Catch::Approx(1.0 + 5.0).margin(1e-12));
}

TEST_CASE("local_loss extracts the crop region") {
    wrc::SplitMix64 rng(33);
    wrc::FeatureMap z_pp(2, 6, 6, rng.normal_vector(72));
    wrc::CropRegion r{1, 2, 3, 3};
    wrc::FeatureMap z_c(2, 3, 3);
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t y = 0; y < 3; ++y) {
            for (std::size_t x = 0; x < 3; ++x) {
                z_c(c, y, x) = z_pp(c, r.top + y, r.left + x);
            }
        }
    }
    REQUIRE(wrc::local_loss(z_c, z_pp, r).value == 0.0);
    REQUIRE_THROWS_AS(wrc::local_loss(z_c, z_pp, wrc::CropRegion{4, 4, 3, 3}),
                      wrc::DimensionError);
    REQUIRE_THROWS_AS(wrc::local_loss(wrc::FeatureMap(2, 2, 2), z_pp, r),
                      wrc::DimensionError);
}

TEST_CASE("total_loss is a plain sum") {
    REQUIRE(wrc::total_loss(0.5, 0.25, 0.125) == 0.875);
}
