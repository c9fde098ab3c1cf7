#include <doctest.h>

#include <cstring>
#include <vector>

#include "geomatch/kernels.hpp"
#include "geomatch/prng.hpp"

using namespace geomatch;

namespace {

std::vector<double> random_array(SplitMix64& rng, std::size_t n, double scale) {
    std::vector<double> v(n);
    for (auto& x : v) x = (rng.next_unit() * 2.0 - 1.0) * scale;
    return v;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("kernel dispatch exposes a working variant") {
    const auto& ops = kern::active_ops();
    CHECK(ops.name != nullptr);
    double xs[3] = {0.0, 3.0, 1.0};
    double ys[3] = {0.0, 4.0, 1.0};
    double out[3];
    ops.sq_dists_to(0.0, 0.0, xs, ys, 3, out);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 25.0);
    CHECK(out[2] == 2.0);
    CHECK(ops.max_value(out, 3) == 25.0);
    CHECK(ops.min_value(out, 3) == 0.0);
}

TEST_CASE("SIMD variants are bit-identical to the scalar reference") {
    const kern::Ops* simd = kern::avx2_ops();
    if (simd == nullptr) simd = kern::neon_ops();
    if (simd == nullptr) {
        MESSAGE("no SIMD variant on this machine; scalar only");
        return;
    }
    const auto& ref = kern::scalar_ops();

    SplitMix64 rng(20240817);
    // sizes straddling the vector width, including ragged tails
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 33u, 100u, 1023u}) {
        for (int rep = 0; rep < 8; ++rep) {
            const double scale = rep % 2 == 0 ? 1.0 : 1e6;
            auto xs = random_array(rng, n, scale);
            auto ys = random_array(rng, n, scale);
            auto bx = random_array(rng, n, scale);
            auto by = random_array(rng, n, scale);
            const double qx = (rng.next_unit() - 0.5) * scale;
            const double qy = (rng.next_unit() - 0.5) * scale;

            std::vector<double> r1(n), r2(n);
            ref.sq_dists_to(qx, qy, xs.data(), ys.data(), n, r1.data());
            simd->sq_dists_to(qx, qy, xs.data(), ys.data(), n, r2.data());
            REQUIRE(bits_equal(r1, r2));

            ref.edge_sq_lengths(xs.data(), ys.data(), bx.data(), by.data(), qx, qy, n,
                                r1.data());
            simd->edge_sq_lengths(xs.data(), ys.data(), bx.data(), by.data(), qx, qy,
                                  n, r2.data());
            REQUIRE(bits_equal(r1, r2));

            // r1 holds nonnegative values now
            std::vector<double> s1(n), s2(n);
            ref.sqrt_array(r1.data(), n, s1.data());
            simd->sqrt_array(r1.data(), n, s2.data());
            REQUIRE(bits_equal(s1, s2));

            REQUIRE(ref.max_value(r1.data(), n) == simd->max_value(r1.data(), n));
            REQUIRE(ref.min_value(r1.data(), n) == simd->min_value(r1.data(), n));
        }
    }
}

TEST_CASE("reductions match a plain loop") {
    SplitMix64 rng(7);
    auto v = random_array(rng, 257, 1e3);
    double mx = v[0], mn = v[0];
    for (double x : v) {
        if (x > mx) mx = x;
        if (x < mn) mn = x;
    }
    CHECK(kern::max_value(v.data(), v.size()) == mx);
    CHECK(kern::min_value(v.data(), v.size()) == mn);
}
