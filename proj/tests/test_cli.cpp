#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include "wrc/io.hpp"
#include "wrc/rng.hpp"
#include "wrc/solver.hpp"

namespace {

const std::string kCli = WRC_CLI_PATH;

int run_cli(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string tmp(const char* name) { return std::string("/tmp/wrc_cli_") + name; }

}  // namespace

TEST_CASE("forward with a delta kernel reproduces the input") {
    wrc::SplitMix64 rng(1);
    wrc::FeatureMap x(2, 6, 6, rng.normal_vector(72));
    wrc::write_tensor(x, tmp("x.wrct"));
    wrc::write_kernel(wrc::Kernel::delta(2), tmp("delta.wrct"));
    REQUIRE(run_cli("forward -x " + tmp("x.wrct") + " -k " + tmp("delta.wrct") +
                    " -o " + tmp("y.wrct") + " -s 1") == 0);
    wrc::FeatureMap y = wrc::read_tensor(tmp("y.wrct"));
    REQUIRE(y.data() == x.data());

    // s=2: header dims halve
    REQUIRE(run_cli("forward -x " + tmp("x.wrct") + " -k " + tmp("delta.wrct") +
                    " -o " + tmp("y2.wrct") + " -s 2") == 0);
    wrc::FeatureMap y2 = wrc::read_tensor(tmp("y2.wrct"));
    REQUIRE(y2.height() == 3);
    REQUIRE(y2.width() == 3);
}

TEST_CASE("solve reduction matches the library converse2d path") {
    wrc::SplitMix64 rng(2);
    wrc::FeatureMap y(1, 4, 4, rng.normal_vector(16));
    wrc::Kernel k(1, 3, 3, rng.normal_vector(9), 1, 1);
    wrc::write_tensor(y, tmp("obs.wrct"));
    wrc::write_kernel(k, tmp("k.wrct"));
    REQUIRE(run_cli("solve -y " + tmp("obs.wrct") + " -k " + tmp("k.wrct") + " -o " +
                    tmp("sol.wrct") +
                    " -s 2 --w-const 1 --wlam-const 0.2 --eps 0 --x0 bilinear") == 0);
    wrc::FeatureMap got = wrc::read_tensor(tmp("sol.wrct"));
    wrc::FeatureMap want =
        wrc::converse2d_solve(y, {k, 2}, 0.2, wrc::default_x0(y, 2));
    for (std::size_t i = 0; i < got.size(); ++i) {
        REQUIRE(std::abs(got.data()[i] - want.data()[i]) < 1e-10);
    }
}

TEST_CASE("solve with a huge regularizer and zero prior returns near-zero") {
    wrc::SplitMix64 rng(3);
    wrc::FeatureMap y(1, 4, 4, rng.normal_vector(16));
    wrc::Kernel k(1, 3, 3, rng.normal_vector(9), 1, 1);
    wrc::write_tensor(y, tmp("obs2.wrct"));
    wrc::write_kernel(k, tmp("k2.wrct"));
    REQUIRE(run_cli("solve -y " + tmp("obs2.wrct") + " -k " + tmp("k2.wrct") + " -o " +
                    tmp("sol2.wrct") + " -s 2 --wlam-const 1e12 --x0 zero") == 0);
    wrc::FeatureMap got = wrc::read_tensor(tmp("sol2.wrct"));
    for (double v : got.data()) REQUIRE(std::abs(v) < 1e-9);
}

TEST_CASE("oracle-check suite passes and the corrupt hook fails") {
    REQUIRE(run_cli("oracle-check --suite 3 --seed 7") == 0);
    REQUIRE(run_cli("oracle-check --suite 1 --seed 7 --corrupt-solver") == 3);
}

TEST_CASE("validation failures exit with code 2") {
    REQUIRE(run_cli("forward -x /nonexistent.wrct -k /nonexistent.wrct -o /tmp/o.wrct") ==
            2);
    // malformed file
    {
        std::ofstream os(tmp("garbage.wrct"), std::ios::binary);
        os << "garbage";
    }
    REQUIRE(run_cli("forward -x " + tmp("garbage.wrct") + " -k " + tmp("garbage.wrct") +
                    " -o /tmp/o.wrct") == 2);
}

TEST_CASE("bccb command reports residuals and writes generators") {
    // expand a known generator into a 1-slice tensor and check residual ~ 0
    wrc::FeatureMap gen(1, 2, 2, {1.0, 2.0, 3.0, 4.0});
    wrc::FeatureMap mat(1, 4, 4);
    for (std::size_t qy = 0; qy < 2; ++qy) {
        for (std::size_t qx = 0; qx < 2; ++qx) {
            for (std::size_t py = 0; py < 2; ++py) {
                for (std::size_t px = 0; px < 2; ++px) {
                    mat(0, qy * 2 + qx, py * 2 + px) =
                        gen(0, (py + 2 - qy) % 2, (px + 2 - qx) % 2);
                }
            }
        }
    }
    wrc::write_tensor(mat, tmp("attn.wrct"));
    REQUIRE(run_cli("bccb -x " + tmp("attn.wrct") + " -o " + tmp("gen.wrct") +
                    " --grid 2 2") == 0);
    wrc::FeatureMap got = wrc::read_tensor(tmp("gen.wrct"));
    for (std::size_t i = 0; i < 4; ++i) {
        REQUIRE(std::abs(got.data()[i] - gen.data()[i]) < 1e-12);
    }
    // wrong grid
    REQUIRE(run_cli("bccb -x " + tmp("attn.wrct") + " -o " + tmp("gen.wrct") +
                    " --grid 3 3") == 2);
}

TEST_CASE("bench command emits lines") {
    REQUIRE(run_cli("bench --sizes 8 --repeats 3 -s 2") == 0);
    REQUIRE(run_cli("bench --sizes 8 --repeats 3 -s 2 --no-dense") == 0);
}
