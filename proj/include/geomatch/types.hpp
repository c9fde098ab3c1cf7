#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace geomatch {

/// Domain error (bad indices, infeasible sizes, malformed inputs, ...).
/// The CLI maps these to exit code 1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Absolute tolerance used for geometric equality comparisons.
inline constexpr double kGeomTol = 1e-9;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// A point of the translation plane.
struct Translation {
    double dx = 0.0;
    double dy = 0.0;

    /// Maps -0.0 components to +0.0 so bitwise deduplication matches
    /// geometric equality.
    Translation canonical() const { return {dx + 0.0, dy + 0.0}; }
};

inline Point2 operator+(Point2 p, Translation t) { return {p.x + t.dx, p.y + t.dy}; }
inline Translation operator-(Point2 b, Point2 a) { return {b.x - a.x, b.y - a.y}; }
inline Translation operator-(Translation a, Translation b) { return {a.dx - b.dx, a.dy - b.dy}; }
inline Translation operator+(Translation a, Translation b) { return {a.dx + b.dx, a.dy + b.dy}; }

inline double sq_norm(Translation t) { return t.dx * t.dx + t.dy * t.dy; }
inline double norm(Translation t) { return std::sqrt(sq_norm(t)); }
inline double sq_dist(Translation a, Translation b) { return sq_norm(a - b); }

inline bool lex_less(Translation a, Translation b) {
    if (a.dx != b.dx) return a.dx < b.dx;
    return a.dy < b.dy;
}
inline bool bit_equal(Translation a, Translation b) {
    return a.dx == b.dx && a.dy == b.dy;
}

/// Exponent of the cost aggregation: a finite real p >= 1 or infinity
/// (bottleneck).
class CostExponent {
  public:
    static CostExponent finite(double v) {
        if (!(std::isfinite(v) && v >= 1.0))
            throw Error("cost exponent must be a finite real >= 1");
        return CostExponent(v, false);
    }
    static CostExponent inf() { return CostExponent(0.0, true); }

    bool is_inf() const { return infinite_; }
    /// Finite exponent value; must not be called for the infinite exponent.
    double value() const {
        if (infinite_) throw Error("infinite cost exponent has no finite value");
        return value_;
    }
    bool is_two() const { return !infinite_ && value_ == 2.0; }

    bool operator==(const CostExponent& o) const {
        return infinite_ == o.infinite_ && (infinite_ || value_ == o.value_);
    }

    /// Parses "inf" or a decimal value >= 1.
    static CostExponent parse(const std::string& tok);
    std::string str() const;

  private:
    CostExponent(double v, bool inf) : value_(v), infinite_(inf) {}
    double value_;
    bool infinite_;
};

struct Disk {
    Translation center;
    double radius = 0.0;
};

/// Axis-aligned grid: vertex (i,j) sits at origin + (i*side, j*side).
struct GridSpec {
    Translation origin;
    double side = 1.0;
    int level = 0;
};

struct Box {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    bool contains(Translation t) const {
        return t.dx >= xmin && t.dx <= xmax && t.dy >= ymin && t.dy <= ymax;
    }
};

/// k disjoint index pairs (into A and into B).
struct Matching {
    std::vector<std::pair<int, int>> pairs;

    int size() const { return static_cast<int>(pairs.size()); }
    bool empty() const { return pairs.empty(); }

    /// Checks index ranges and pairwise-distinct a/b indices.
    void validate(int m, int n) const;

    /// Sorts pairs by a-index (the canonical order used everywhere).
    void canonicalize();

    bool operator==(const Matching& o) const { return pairs == o.pairs; }
    /// Lexicographic order on the flattened pair list.
    bool lex_less(const Matching& o) const { return pairs < o.pairs; }
};

/// Structure-of-arrays view of a point/translation set, the layout the
/// kernels consume.
struct Coords {
    std::vector<double> x, y;

    Coords() = default;
    explicit Coords(std::span<const Translation> ts) {
        x.reserve(ts.size());
        y.reserve(ts.size());
        for (const auto& t : ts) {
            x.push_back(t.dx);
            y.push_back(t.dy);
        }
    }
    explicit Coords(std::span<const Point2> ps) {
        x.reserve(ps.size());
        y.reserve(ps.size());
        for (const auto& p : ps) {
            x.push_back(p.x);
            y.push_back(p.y);
        }
    }

    std::size_t size() const { return x.size(); }
};

}  // namespace geomatch
