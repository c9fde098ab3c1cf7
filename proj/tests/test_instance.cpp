#include <doctest.h>

#include <set>
#include <string>

#include "geomatch/instance.hpp"
#include "geomatch/prng.hpp"

using namespace geomatch;

TEST_CASE("parse the minimal instance") {
    Instance inst = parse_instance("1 1 1 2\n0 0\n3 4\n");
    CHECK(inst.m == 1);
    CHECK(inst.n == 1);
    CHECK(inst.k == 1);
    CHECK(inst.p.value() == 2.0);
    CHECK(inst.A[0].x == 0.0);
    CHECK(inst.B[0].x == 3.0);
    CHECK(inst.B[0].y == 4.0);
}

TEST_CASE("parse inf exponent, comments and names") {
    Instance inst = parse_instance(
        "# name: demo\n"
        "2 2 2 inf   # header\n"
        "0 0\n"
        "1 0\n"
        "# interlude\n"
        "0 1\n"
        "1 1\n");
    CHECK(inst.p.is_inf());
    CHECK(inst.name == "demo");
    CHECK(inst.B[1].y == 1.0);
}

TEST_CASE("parse errors carry line numbers") {
    CHECK_THROWS_AS(parse_instance(""), ParseError);
    try {
        parse_instance("1 1\n0 0\n1 1\n");
        FAIL("expected throw");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
    }
    try {
        parse_instance("1 1 1 2\n0 zero\n3 4\n");
        FAIL("expected throw");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("non-numeric") != std::string::npos);
    }
    try {
        parse_instance("2 1 1 2\n0 0\n3 4\n");  // missing one A point line
        FAIL("expected throw");
    } catch (const ParseError& e) {
        (void)e;  // either truncated points or trailing mismatch, with a line
    }
    CHECK_THROWS_AS(parse_instance("1 1 4 2\n0 0\n3 4\n"), ParseError);  // k > min
    CHECK_THROWS_AS(parse_instance("1 1 1 0.5\n0 0\n3 4\n"), ParseError);  // p < 1
    CHECK_THROWS_AS(parse_instance("1 1 1 2\n0 0\n3 4\n5 5\n"), ParseError);
}

TEST_CASE("JSON alternate form") {
    Instance inst = parse_instance(
        R"({"m":1,"n":2,"k":1,"p":"inf","A":[[0,0]],"B":[[1,1],[2,2]],"name":"j"})");
    CHECK(inst.p.is_inf());
    CHECK(inst.n == 2);
    CHECK(inst.name == "j");
    CHECK_THROWS_AS(parse_instance("{bad json"), ParseError);
}

TEST_CASE("write/parse round trip is a fixed point") {
    SplitMix64 rng(31);
    for (int rep = 0; rep < 40; ++rep) {
        int m = 1 + static_cast<int>(rng.next_below(6));
        int n = 1 + static_cast<int>(rng.next_below(6));
        int k = 1 + static_cast<int>(rng.next_below(std::min(m, n)));
        CostExponent p = rep % 3 == 0   ? CostExponent::inf()
                         : rep % 3 == 1 ? CostExponent::finite(1 + rng.next_unit() * 5)
                                        : CostExponent::finite(2);
        Instance inst = gen_random_instance(m, n, k, p, 100.0, rng.next());
        if (rep % 2 == 0) inst.name = "fuzz-" + std::to_string(rep);
        std::string once = write_instance(parse_instance(write_instance(inst)));
        std::string twice = write_instance(parse_instance(once));
        CHECK(once == twice);
    }
}

TEST_CASE("random generator is seeded and in-bounds") {
    Instance a = gen_random_instance(5, 7, 3, CostExponent::finite(1), 10.0, 42);
    Instance b = gen_random_instance(5, 7, 3, CostExponent::finite(1), 10.0, 42);
    Instance c = gen_random_instance(5, 7, 3, CostExponent::finite(1), 10.0, 43);
    CHECK(write_instance(a) == write_instance(b));
    CHECK(write_instance(a) != write_instance(c));
    CHECK(a.A.size() == 5);
    CHECK(a.B.size() == 7);
    for (const auto& pt : a.A) {
        CHECK(pt.x >= 0.0);
        CHECK(pt.x <= 10.0);
        CHECK(pt.y >= 0.0);
        CHECK(pt.y <= 10.0);
    }
    CHECK_THROWS_AS(gen_random_instance(0, 5, 1, CostExponent::finite(1), 10, 1), Error);
    CHECK_THROWS_AS(gen_random_instance(3, 5, 4, CostExponent::finite(1), 10, 1), Error);
}

TEST_CASE("grid generator shape and alignment count") {
    Instance g = gen_grid_instance(2, 4, 4, CostExponent::finite(1));
    CHECK(g.m == 4);
    CHECK(g.n == 16);
    // count integer translations aligning all of A into B at zero cost
    std::set<std::pair<double, double>> bset;
    for (const auto& b : g.B) bset.insert({b.x, b.y});
    int zero_shifts = 0;
    for (int tx = -4; tx <= 4; ++tx)
        for (int ty = -4; ty <= 4; ++ty) {
            bool all = true;
            for (const auto& a : g.A)
                if (!bset.count({a.x + tx, a.y + ty})) all = false;
            if (all) ++zero_shifts;
        }
    CHECK(zero_shifts == 9);

    Instance same = gen_grid_instance(3, 3, 9, CostExponent::finite(2));
    std::set<std::pair<double, double>> sset;
    for (const auto& b : same.B) sset.insert({b.x, b.y});
    int aligned = 0;
    for (int tx = -3; tx <= 3; ++tx)
        for (int ty = -3; ty <= 3; ++ty) {
            bool all = true;
            for (const auto& a : same.A)
                if (!sset.count({a.x + tx, a.y + ty})) all = false;
            if (all) ++aligned;
        }
    CHECK(aligned == 1);

    CHECK_THROWS_AS(gen_grid_instance(4, 2, 1, CostExponent::finite(1)), Error);
}

TEST_CASE("instance hash separates instances") {
    Instance a = gen_random_instance(4, 4, 2, CostExponent::finite(2), 10.0, 1);
    Instance b = gen_random_instance(4, 4, 2, CostExponent::finite(2), 10.0, 2);
    CHECK(instance_hash(a.A, a.B, a.k, a.p) != instance_hash(b.A, b.B, b.k, b.p));
    CHECK(instance_hash(a.A, a.B, 2, a.p) != instance_hash(a.A, a.B, 1, a.p));
    CHECK(instance_hash(a.A, a.B, 2, CostExponent::finite(2)) !=
          instance_hash(a.A, a.B, 2, CostExponent::inf()));
    CHECK(instance_hash(a.A, a.B, a.k, a.p) == instance_hash(a.A, a.B, a.k, a.p));
}
