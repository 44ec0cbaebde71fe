#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "wrc/io.hpp"
#include "wrc/rng.hpp"
#include "wrc/tensor.hpp"

namespace {

std::string tmp_path(const char* name) {
    return std::string("/tmp/wrc_test_") + name;
}

std::vector<char> slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    return std::vector<char>(std::istreambuf_iterator<char>(is),
                             std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("FeatureMap shape and indexing") {
    wrc::FeatureMap t(2, 3, 4);
    REQUIRE(t.size() == 24);
    t(1, 2, 3) = 7.5;
    REQUIRE(t.data()[(1 * 3 + 2) * 4 + 3] == 7.5);
    REQUIRE(t.channel(1)[2 * 4 + 3] == 7.5);
    REQUIRE_THROWS_AS(wrc::FeatureMap(2, 3, 4, std::vector<double>(5)),
                      wrc::DimensionError);
    std::vector<double> bad(24, 0.0);
    bad[7] = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(wrc::FeatureMap(2, 3, 4, bad), wrc::ValidationError);
}

TEST_CASE("Kernel origin validation and delta factory") {
    REQUIRE_THROWS_AS(wrc::Kernel(1, 3, 3, std::vector<double>(9, 0.0), 3, 0),
                      wrc::ValidationError);
    wrc::Kernel d = wrc::Kernel::delta(3);
    REQUIRE(d.kh() == 1);
    REQUIRE(d(2, 0, 0) == 1.0);
}

TEST_CASE("WeightField rejects negatives and non-finite values") {
    std::vector<double> v(4, 1.0);
    v[2] = -0.5;
    REQUIRE_THROWS_AS(wrc::WeightField(1, 2, 2, v, wrc::WeightRole::DataFidelity),
                      wrc::ValidationError);
    v[2] = std::numeric_limits<double>::infinity();
    REQUIRE_THROWS_AS(wrc::WeightField(1, 2, 2, v, wrc::WeightRole::DataFidelity),
                      wrc::ValidationError);
    wrc::WeightField ok = wrc::WeightField::constant(1, 2, 2, 0.0,
                                                     wrc::WeightRole::Regularizer);
    REQUIRE(ok.role() == wrc::WeightRole::Regularizer);
}

TEST_CASE("WRCT tensor round trip is bit-exact") {
    wrc::SplitMix64 rng(99);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t c = 1 + rng.next_u64() % 3;
        const std::size_t h = 1 + rng.next_u64() % 7;
        const std::size_t w = 1 + rng.next_u64() % 7;
        wrc::FeatureMap t(c, h, w, rng.normal_vector(c * h * w));
        const std::string path = tmp_path("roundtrip.wrct");
        wrc::write_tensor(t, path);
        wrc::FeatureMap u = wrc::read_tensor(path);
        REQUIRE(u.same_shape(t));
        REQUIRE(std::memcmp(u.data().data(), t.data().data(),
                            t.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("WRCT weight-field and kernel round trips") {
    wrc::SplitMix64 rng(7);
    wrc::WeightField f(2, 3, 3, rng.uniform_vector(18, 0.0, 5.0),
                       wrc::WeightRole::DataFidelity);
    const std::string wf = tmp_path("wf.wrct");
    wrc::write_weight_field(f, wf);
    wrc::WeightField g = wrc::read_weight_field(wf, wrc::WeightRole::DataFidelity);
    REQUIRE(g.data() == f.data());

    wrc::Kernel k(2, 3, 5, rng.normal_vector(30), 1, 2);
    const std::string kf = tmp_path("k.wrct");
    wrc::write_kernel(k, kf);
    wrc::Kernel k2 = wrc::read_kernel(kf);
    REQUIRE(k2.taps() == k.taps());
    REQUIRE(k2.origin_y() == 1);
    REQUIRE(k2.origin_x() == 2);
}

TEST_CASE("WRCT format errors") {
    const std::string path = tmp_path("bad.wrct");
    {
        std::ofstream os(path, std::ios::binary);
        os << "NOPE";
    }
    REQUIRE_THROWS_AS(wrc::read_tensor(path), wrc::FormatError);

    // role mismatch: a kernel read as a tensor
    wrc::write_kernel(wrc::Kernel::delta(1), path);
    REQUIRE_THROWS_AS(wrc::read_tensor(path), wrc::FormatError);

    // truncated payload
    wrc::write_tensor(wrc::FeatureMap(1, 4, 4), path);
    {
        auto bytes = slurp(path);
        std::ofstream os(path, std::ios::binary);
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 9));
    }
    REQUIRE_THROWS_AS(wrc::read_tensor(path), wrc::IoError);

    REQUIRE_THROWS_AS(wrc::read_tensor("/nonexistent/nowhere.wrct"), wrc::IoError);
}

TEST_CASE("golden tensor file is byte-identical") {
    // fixed fixture: seed 42, uniform [-1, 1), shape 2x3x5
    wrc::SplitMix64 rng(42);
    wrc::FeatureMap t(2, 3, 5, rng.uniform_vector(30, -1.0, 1.0));
    const std::string path = tmp_path("golden_rewrite.wrct");
    wrc::write_tensor(t, path);
    auto actual = slurp(path);
    auto golden = slurp(std::string(WRC_DATA_DIR) + "/golden.wrct");
    REQUIRE(actual == golden);
}
