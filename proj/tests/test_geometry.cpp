#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "geomatch/geometry.hpp"
#include "geomatch/prng.hpp"
#include "support/oracle.hpp"

using namespace geomatch;

namespace {

std::vector<Translation> random_translations(SplitMix64& rng, int n, double scale) {
    std::vector<Translation> v;
    v.reserve(n);
    for (int i = 0; i < n; ++i)
        v.push_back({(rng.next_unit() - 0.5) * scale, (rng.next_unit() - 0.5) * scale});
    return v;
}

struct RandomCase {
    std::vector<Point2> A, B;
    Matching M;
    Translation t;
};

RandomCase random_case(SplitMix64& rng, int k) {
    RandomCase rc;
    for (int i = 0; i < k; ++i) {
        rc.A.push_back({rng.next_unit() * 10, rng.next_unit() * 10});
        rc.B.push_back({rng.next_unit() * 10, rng.next_unit() * 10});
        rc.M.pairs.emplace_back(i, i);
    }
    rc.t = {(rng.next_unit() - 0.5) * 4, (rng.next_unit() - 0.5) * 4};
    return rc;
}

const CostExponent kPs[] = {CostExponent::finite(1), CostExponent::finite(1.5),
                            CostExponent::finite(2), CostExponent::finite(3),
                            CostExponent::inf()};

}  // namespace

TEST_CASE("cost_evaluate basics") {
    std::vector<Point2> A = {{0, 0}};
    std::vector<Point2> B = {{3, 4}};
    Matching M{{{0, 0}}};
    CHECK(cost_evaluate(A, B, M, {0, 0}, CostExponent::finite(1)) == doctest::Approx(5.0));

    // edge lengths {1, 2}
    std::vector<Point2> A2 = {{0, 0}, {0, 0}};
    std::vector<Point2> B2 = {{1, 0}, {2, 0}};
    Matching M2{{{0, 0}, {1, 1}}};
    CHECK(cost_evaluate(A2, B2, M2, {0, 0}, CostExponent::inf()) == doctest::Approx(2.0));
    CHECK(cost_evaluate(A2, B2, M2, {0, 0}, CostExponent::finite(2)) ==
          doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
}

TEST_CASE("cost_evaluate errors") {
    std::vector<Point2> A = {{0, 0}};
    std::vector<Point2> B = {{1, 1}};
    Matching empty;
    CHECK_THROWS_WITH_AS(cost_evaluate(A, B, empty, {0, 0}, CostExponent::finite(1)),
                         "empty matching", Error);
    Matching bad{{{0, 3}}};
    CHECK_THROWS_WITH_AS(cost_evaluate(A, B, bad, {0, 0}, CostExponent::finite(1)),
                         "index out of range", Error);
}

TEST_CASE("cost is 1-Lipschitz in the translation") {
    SplitMix64 rng(11);
    for (const auto& p : kPs) {
        for (int rep = 0; rep < 200; ++rep) {
            auto rc = random_case(rng, 1 + static_cast<int>(rng.next_below(6)));
            Translation delta{(rng.next_unit() - 0.5) * 3, (rng.next_unit() - 0.5) * 3};
            double c0 = cost_evaluate(rc.A, rc.B, rc.M, rc.t, p);
            double c1 = cost_evaluate(rc.A, rc.B, rc.M, rc.t + delta, p);
            CHECK(c1 <= c0 + norm(delta) + 1e-9);
        }
    }
}

TEST_CASE("p=2 shift identity") {
    SplitMix64 rng(12);
    for (int rep = 0; rep < 200; ++rep) {
        auto rc = random_case(rng, 1 + static_cast<int>(rng.next_below(6)));
        Translation delta{(rng.next_unit() - 0.5) * 3, (rng.next_unit() - 0.5) * 3};
        const auto p2 = CostExponent::finite(2);
        double c0 = cost_evaluate(rc.A, rc.B, rc.M, rc.t, p2);
        double c1 = cost_evaluate(rc.A, rc.B, rc.M, rc.t + delta, p2);
        double dot = 0.0;
        for (auto [ai, bi] : rc.M.pairs) {
            dot += (rc.A[ai].x + rc.t.dx - rc.B[bi].x) * delta.dx;
            dot += (rc.A[ai].y + rc.t.dy - rc.B[bi].y) * delta.dy;
        }
        double k = rc.M.size();
        double rhs = c0 * c0 + 2.0 / k * dot + sq_norm(delta);
        CHECK(std::abs(c1 * c1 - rhs) <= 1e-9 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("normalized cost is monotone nondecreasing in p") {
    // power means grow with p; the unnormalized p-norms shrink with p
    SplitMix64 rng(13);
    const double exps[] = {1.0, 1.5, 2.0, 3.0, 8.0, 64.0};
    for (int rep = 0; rep < 100; ++rep) {
        auto rc = random_case(rng, 2 + static_cast<int>(rng.next_below(5)));
        double prev = 0.0;
        double prev_unnorm = std::numeric_limits<double>::infinity();
        const double k = rc.M.size();
        for (double pv : exps) {
            double c = cost_evaluate(rc.A, rc.B, rc.M, rc.t, CostExponent::finite(pv));
            CHECK(c >= prev - 1e-9 * (1.0 + c));
            double unnorm = c * std::pow(k, 1.0 / pv);
            CHECK(unnorm <= prev_unnorm + 1e-9 * (1.0 + unnorm));
            prev = c;
            prev_unnorm = unnorm;
        }
        double cinf = cost_evaluate(rc.A, rc.B, rc.M, rc.t, CostExponent::inf());
        CHECK(prev <= cinf + 1e-9);
    }
}

TEST_CASE("p=64 approaches the bottleneck once one edge dominates") {
    // edge length ratios >= 2: the unnormalized 64-norm sits within 1e-6 of
    // the maximum, so compare after undoing the 1/k normalization
    std::vector<Point2> A = {{0, 0}, {0, 0}, {0, 0}};
    std::vector<Point2> B = {{4, 0}, {2, 0}, {1, 0}};
    Matching M{{{0, 0}, {1, 1}, {2, 2}}};
    double c64 = cost_evaluate(A, B, M, {0, 0}, CostExponent::finite(64));
    double cinf = cost_evaluate(A, B, M, {0, 0}, CostExponent::inf());
    CHECK(c64 * std::pow(3.0, 1.0 / 64.0) == doctest::Approx(cinf).epsilon(1e-6));
    CHECK(c64 <= cinf + 1e-9);
}

TEST_CASE("nearest_site basics and tie-breaks") {
    std::vector<Translation> sites = {{1, 0}, {0, 2}};
    auto r = nearest_site({0, 0}, sites);
    CHECK(r.index == 0);
    CHECK(r.distance == doctest::Approx(1.0));

    auto self = nearest_site({0, 2}, sites);
    CHECK(self.index == 1);
    CHECK(self.distance == 0.0);

    std::vector<Translation> tied = {{1, 0}, {-1, 0}};
    CHECK(nearest_site({0, 0}, tied).index == 1);  // lexicographically smaller site

    CHECK_THROWS_AS(nearest_site({0, 0}, std::span<const Translation>{}), Error);
}

TEST_CASE("nearest_site is invariant under permutation of tied sites") {
    std::vector<Translation> sites = {{0, 1}, {1, 0}, {0, -1}, {-1, 0}};
    std::vector<Translation> perm = sites;
    std::sort(perm.begin(), perm.end(), [](auto a, auto b) { return lex_less(a, b); });
    auto r1 = nearest_site({0, 0}, sites);
    auto r2 = nearest_site({0, 0}, perm);
    CHECK(bit_equal(sites[r1.index], perm[r2.index]));
}

TEST_CASE("min_enclosing_disk trivial cases") {
    std::vector<Translation> one = {{0, 0}};
    auto d1 = min_enclosing_disk(one);
    CHECK(d1.radius == 0.0);
    CHECK(bit_equal(d1.center, {0, 0}));

    std::vector<Translation> two = {{0, 0}, {2, 0}};
    auto d2 = min_enclosing_disk(two);
    CHECK(d2.center.dx == doctest::Approx(1.0));
    CHECK(d2.center.dy == doctest::Approx(0.0));
    CHECK(d2.radius == doctest::Approx(1.0));

    CHECK_THROWS_AS(min_enclosing_disk(std::span<const Translation>{}), Error);
}

TEST_CASE("min_enclosing_disk matches the support-set enumeration") {
    SplitMix64 rng(21);
    for (int rep = 0; rep < 40; ++rep) {
        auto pts = random_translations(rng, 2 + static_cast<int>(rng.next_below(12)), 10);
        auto welzl = min_enclosing_disk(pts);
        auto brute = test::exact_enclosing_disk(pts);
        CHECK(std::abs(welzl.radius - brute.radius) <= 1e-9 * (1.0 + brute.radius));
        for (const auto& q : pts)
            CHECK(sq_dist(q, welzl.center) <=
                  welzl.radius * welzl.radius * (1 + 1e-9) + 1e-12);
    }
}

TEST_CASE("approx_smallest_hdisk examples") {
    std::vector<Translation> two = {{0, 0}, {2, 0}};
    auto d = approx_smallest_hdisk(two, 2);
    CHECK(d.radius == doctest::Approx(2.0));
    CHECK((bit_equal(d.center, {0, 0}) || bit_equal(d.center, {2, 0})));

    std::vector<Translation> coincident = {{5, 5}, {5, 5.5}, {5, 5}, {5, 5}};
    auto dz = approx_smallest_hdisk(coincident, 3);
    CHECK(dz.radius == 0.0);
    CHECK(bit_equal(dz.center, {5, 5}));

    CHECK_THROWS_AS(approx_smallest_hdisk(two, 3), Error);
    CHECK_THROWS_AS(approx_smallest_hdisk(two, 0), Error);
}

TEST_CASE("approx_smallest_hdisk stays within factor 2 of exact") {
    SplitMix64 rng(22);
    for (int rep = 0; rep < 60; ++rep) {
        int n = 2 + static_cast<int>(rng.next_below(14));  // |P| <= 15
        auto pts = random_translations(rng, n, 10);
        int h = 1 + static_cast<int>(rng.next_below(n));
        auto approx = approx_smallest_hdisk(pts, h);
        auto exact = test::exact_smallest_hdisk(pts, h);
        CHECK(approx.radius >= exact.radius - 1e-9);
        CHECK(approx.radius <= 2.0 * exact.radius + 1e-9);
    }
    // the 12-point, h = 4 configuration spelled out in the contract
    SplitMix64 rng12(220);
    auto pts = random_translations(rng12, 12, 10);
    auto approx = approx_smallest_hdisk(pts, 4);
    auto exact = test::exact_smallest_hdisk(pts, 4);
    CHECK(approx.radius <= 2.0 * exact.radius + 1e-9);
    CHECK(approx.radius >= exact.radius - 1e-9);
}

TEST_CASE("grid_vertices_covering_disk geometry") {
    // radius 0: exactly the cell holding the center, whose corner it is
    auto degenerate = grid_vertices_covering_disk({{0, 0}, 0.0}, 1.0);
    REQUIRE(degenerate.size() == 4);
    bool center_found = false;
    for (const auto& v : degenerate)
        if (bit_equal(v, {0, 0})) center_found = true;
    CHECK(center_found);

    CHECK_THROWS_AS(grid_vertices_covering_disk({{0, 0}, 1.0}, 0.0), Error);
    CHECK_THROWS_AS(grid_vertices_covering_disk({{0, 0}, 1.0}, -1.0), Error);

    // side/sqrt(2) coverage: radius 18 disk, side sqrt(2) -> within 1
    auto verts = grid_vertices_covering_disk({{3, -2}, 18.0}, std::sqrt(2.0));
    SplitMix64 rng(23);
    for (int rep = 0; rep < 300; ++rep) {
        double ang = rng.next_unit() * 6.283185307179586;
        double rad = std::sqrt(rng.next_unit()) * 18.0;
        Translation q{3 + rad * std::cos(ang), -2 + rad * std::sin(ang)};
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : verts) best = std::min(best, norm(q - v));
        CHECK(best <= 1.0 + 1e-9);
    }
}

TEST_CASE("grid_vertices_covering_disk matches an independent cell scan") {
    const double side = 0.25;
    auto verts = grid_vertices_covering_disk({{0, 0}, 1.0}, side);

    // direct enumeration with its own loop bounds
    std::vector<std::pair<long long, long long>> cells;
    for (long long i = -8; i <= 8; ++i)
        for (long long j = -8; j <= 8; ++j) {
            double x0 = i * side, x1 = (i + 1) * side;
            double y0 = j * side, y1 = (j + 1) * side;
            double qx = std::clamp(0.0, x0, x1);
            double qy = std::clamp(0.0, y0, y1);
            double d2 = qx * qx + qy * qy;
            if (d2 > 1.0) continue;
            if (d2 == 1.0 && (qx == x1 || qy == y1)) continue;
            cells.emplace_back(i, j);
        }
    std::vector<std::pair<long long, long long>> vset;
    for (auto [i, j] : cells) {
        vset.emplace_back(i, j);
        vset.emplace_back(i + 1, j);
        vset.emplace_back(i, j + 1);
        vset.emplace_back(i + 1, j + 1);
    }
    std::sort(vset.begin(), vset.end());
    vset.erase(std::unique(vset.begin(), vset.end()), vset.end());
    CHECK(verts.size() == vset.size());
}

TEST_CASE("grid vertices are sorted and deduplicated") {
    auto verts = grid_vertices_covering_disk({{1, 1}, 2.5}, 0.5);
    for (std::size_t i = 1; i < verts.size(); ++i) {
        CHECK(lex_less(verts[i - 1], verts[i]));
    }
}
