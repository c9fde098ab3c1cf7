#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "geomatch/types.hpp"

namespace geomatch {

/// Malformed instance text; line is 1-based (0 when no line applies).
struct ParseError : Error {
    int line;
    ParseError(int ln, const std::string& msg)
        : Error("line " + std::to_string(ln) + ": " + msg), line(ln) {}
};

struct Instance {
    int m = 0, n = 0, k = 0;
    CostExponent p = CostExponent::finite(1.0);
    std::vector<Point2> A, B;
    std::string name;

    void validate() const;
};

/// Text format: header "m n k p" (p decimal or "inf"), then m point lines and
/// n point lines, one "x y" pair each. '#' starts a comment; a leading
/// "# name: <text>" comment carries the instance name. Input starting with
/// '{' parses as the JSON alternate {"m","n","k","p","A","B","name"?}.
Instance parse_instance(const std::string& text);

/// Canonical text form; coordinates printed with 17 significant digits, so
/// write(parse(x)) is a fixed point.
std::string write_instance(const Instance& inst);

Instance load_instance_file(const std::string& path);
void save_instance_file(const Instance& inst, const std::string& path);

/// Uniform points in [0, box_side]^2, SplitMix64-seeded (A drawn first, x
/// before y).
Instance gen_random_instance(int m, int n, int k, CostExponent p, double box_side,
                             std::uint64_t seed);

/// A = m_side x m_side unit grid, B = n_side x n_side unit grid (row-major,
/// x fastest).
Instance gen_grid_instance(int m_side, int n_side, int k, CostExponent p);

/// FNV-1a over the sizes, the exponent and the coordinate bit patterns;
/// diagrams remember it and refuse queries against a different instance.
std::uint64_t instance_hash(std::span<const Point2> A, std::span<const Point2> B,
                            int k, CostExponent p);

}  // namespace geomatch
