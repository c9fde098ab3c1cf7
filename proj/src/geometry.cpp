#include "geomatch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "geomatch/kernels.hpp"
#include "geomatch/prng.hpp"

namespace geomatch {

void Matching::validate(int m, int n) const {
    std::vector<char> a_used(m, 0), b_used(n, 0);
    for (const auto& [ai, bi] : pairs) {
        if (ai < 0 || ai >= m || bi < 0 || bi >= n) throw Error("index out of range");
        if (a_used[ai] || b_used[bi]) throw Error("duplicate index in matching");
        a_used[ai] = 1;
        b_used[bi] = 1;
    }
}

void Matching::canonicalize() { std::sort(pairs.begin(), pairs.end()); }

CostExponent CostExponent::parse(const std::string& tok) {
    if (tok == "inf") return inf();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw Error("invalid cost exponent '" + tok + "'");
    }
    if (used != tok.size()) throw Error("invalid cost exponent '" + tok + "'");
    return finite(v);
}

std::string CostExponent::str() const {
    if (infinite_) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value_);
    return buf;
}

namespace {

struct EdgeScratch {
    std::vector<double> ax, ay, bx, by, sq;
};

EdgeScratch& edge_scratch() {
    static thread_local EdgeScratch s;
    return s;
}

}  // namespace

double cost_evaluate(std::span<const Point2> A, std::span<const Point2> B,
                     const Matching& M, Translation t, CostExponent p) {
    if (M.empty()) throw Error("empty matching");
    const std::size_t k = M.pairs.size();
    auto& s = edge_scratch();
    s.ax.resize(k);
    s.ay.resize(k);
    s.bx.resize(k);
    s.by.resize(k);
    s.sq.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto [ai, bi] = M.pairs[i];
        if (ai < 0 || ai >= static_cast<int>(A.size()) || bi < 0 ||
            bi >= static_cast<int>(B.size()))
            throw Error("index out of range");
        s.ax[i] = A[ai].x;
        s.ay[i] = A[ai].y;
        s.bx[i] = B[bi].x;
        s.by[i] = B[bi].y;
    }
    kern::edge_sq_lengths(s.ax.data(), s.ay.data(), s.bx.data(), s.by.data(), t.dx,
                          t.dy, k, s.sq.data());

    const double max_sq = kern::max_value(s.sq.data(), k);
    if (p.is_inf()) return std::sqrt(max_sq);
    if (max_sq == 0.0) return 0.0;

    const double pv = p.value();
    const double inv_k = 1.0 / static_cast<double>(k);
    if (pv == 1.0) {
        kern::sqrt_array(s.sq.data(), k, s.sq.data());
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) sum += s.sq[i];
        return sum * inv_k;
    }
    if (pv == 2.0) {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) sum += s.sq[i] / max_sq;
        return std::sqrt(max_sq) * std::sqrt(sum * inv_k);
    }
    // ratios (len/max_len)^p stay in [0,1]; the max term contributes 1
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += std::pow(s.sq[i] / max_sq, 0.5 * pv);
    return std::sqrt(max_sq) * std::pow(sum * inv_k, 1.0 / pv);
}

namespace {

NearestSite nearest_site_impl(Translation t, const double* xs, const double* ys,
                              std::size_t n) {
    if (n == 0) throw Error("empty site list");
    static thread_local std::vector<double> sq;
    sq.resize(n);
    kern::sq_dists_to(t.dx, t.dy, xs, ys, n, sq.data());
    const double m = kern::min_value(sq.data(), n);
    int best = -1;
    for (std::size_t i = 0; i < n; ++i) {
        if (sq[i] != m) continue;
        Translation cand{xs[i], ys[i]};
        if (best < 0 || lex_less(cand, Translation{xs[best], ys[best]}))
            best = static_cast<int>(i);
    }
    return {best, std::sqrt(m)};
}

}  // namespace

NearestSite nearest_site(Translation t, std::span<const Translation> sites) {
    static thread_local Coords c;
    c.x.clear();
    c.y.clear();
    for (const auto& s : sites) {
        c.x.push_back(s.dx);
        c.y.push_back(s.dy);
    }
    return nearest_site_impl(t, c.x.data(), c.y.data(), sites.size());
}

NearestSite nearest_site(Translation t, const Coords& sites) {
    return nearest_site_impl(t, sites.x.data(), sites.y.data(), sites.size());
}

namespace {

// Containment with a small relative slack; Welzl support disks are built
// from at most 3 boundary points, so this absorbs the rounding of the
// circumcenter formulas.
bool disk_contains(const Disk& d, Translation q, double slack) {
    return sq_dist(q, d.center) <= d.radius * d.radius + slack;
}

Disk disk_two(Translation a, Translation b) {
    Translation c{0.5 * (a.dx + b.dx), 0.5 * (a.dy + b.dy)};
    double r = 0.5 * norm(b - a);
    return {c, r};
}

// Circumscribed disk; for (near-)collinear triples falls back to the best
// two-point disk covering the third point.
Disk disk_three(Translation a, Translation b, Translation c) {
    double abx = b.dx - a.dx, aby = b.dy - a.dy;
    double acx = c.dx - a.dx, acy = c.dy - a.dy;
    double den = 2.0 * (abx * acy - aby * acx);
    double scale = std::max({std::abs(abx), std::abs(aby), std::abs(acx), std::abs(acy), 1e-300});
    if (std::abs(den) > 1e-14 * scale * scale) {
        double ab2 = abx * abx + aby * aby;
        double ac2 = acx * acx + acy * acy;
        double ux = (acy * ab2 - aby * ac2) / den;
        double uy = (abx * ac2 - acx * ab2) / den;
        Translation center{a.dx + ux, a.dy + uy};
        double r2 = std::max({sq_dist(center, a), sq_dist(center, b), sq_dist(center, c)});
        return {center, std::sqrt(r2)};
    }
    Disk best{{0, 0}, -1.0};
    const Translation pts[3] = {a, b, c};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            Disk d = disk_two(pts[i], pts[j]);
            double slack = 1e-12 * (1.0 + d.radius * d.radius);
            if (disk_contains(d, pts[3 - i - j], slack) &&
                (best.radius < 0 || d.radius < best.radius))
                best = d;
        }
    if (best.radius >= 0) return best;
    // fully degenerate (coincident points)
    return disk_two(a, b);
}

}  // namespace

Disk min_enclosing_disk(std::span<const Translation> P) {
    if (P.empty()) throw Error("empty point set");
    std::vector<Translation> pts(P.begin(), P.end());
    // fixed-seed shuffle keeps the expected-linear behaviour and replayable runs
    SplitMix64 rng(0x5EB001D15C0FFEEull);
    for (std::size_t i = pts.size() - 1; i > 0; --i)
        std::swap(pts[i], pts[rng.next_below(i + 1)]);

    Disk d{pts[0], 0.0};
    auto slack = [](const Disk& dd) { return 1e-12 * (1.0 + dd.radius * dd.radius); };
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (disk_contains(d, pts[i], slack(d))) continue;
        d = Disk{pts[i], 0.0};
        for (std::size_t j = 0; j < i; ++j) {
            if (disk_contains(d, pts[j], slack(d))) continue;
            d = disk_two(pts[i], pts[j]);
            for (std::size_t q = 0; q < j; ++q) {
                if (disk_contains(d, pts[q], slack(d))) continue;
                d = disk_three(pts[i], pts[j], pts[q]);
            }
        }
    }
    d.center = d.center.canonical();
    return d;
}

Disk approx_smallest_hdisk(std::span<const Translation> P, int h) {
    const std::size_t n = P.size();
    if (n == 0) throw Error("empty point set");
    if (h < 1 || static_cast<std::size_t>(h) > n) throw Error("h out of range");

    Coords c{P};
    std::vector<double> sq(n), sel(n);
    int best = -1;
    double best_r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        kern::sq_dists_to(P[i].dx, P[i].dy, c.x.data(), c.y.data(), n, sq.data());
        sel = sq;
        std::nth_element(sel.begin(), sel.begin() + (h - 1), sel.end());
        double r2 = sel[h - 1];
        if (best < 0 || r2 < best_r2 || (r2 == best_r2 && lex_less(P[i], P[best]))) {
            best = static_cast<int>(i);
            best_r2 = r2;
        }
    }
    return {P[best].canonical(), std::sqrt(best_r2)};
}

namespace {

// Squared distance from the disk center (the grid origin) to the closed cell
// [i*s,(i+1)*s) x [j*s,(j+1)*s), with inclusion of exact tangencies only when
// the contact point lies inside the half-open cell.
struct CellTest {
    double side, r2;

    bool include(long long i, long long j) const {
        const double qx = i > 0   ? static_cast<double>(i) * side
                          : i < 0 ? static_cast<double>(i + 1) * side
                                  : 0.0;
        const double qy = j > 0   ? static_cast<double>(j) * side
                          : j < 0 ? static_cast<double>(j + 1) * side
                                  : 0.0;
        const double d2 = qx * qx + qy * qy;
        if (d2 < r2) return true;
        if (d2 == r2) return i >= 0 && j >= 0;  // clamp point on the kept edges
        return false;
    }
};

}  // namespace

std::vector<Translation> grid_vertices_covering_disk(const Disk& D, double side) {
    if (!(side > 0.0) || !std::isfinite(side)) throw Error("grid side must be positive");
    if (!(D.radius >= 0.0) || !std::isfinite(D.radius)) throw Error("invalid disk radius");

    const double span = D.radius / side;
    if (span > 20000.0) throw Error("grid too fine for disk");
    const CellTest cell{side, D.radius * D.radius};

    // The disk is convex and anchored at a grid vertex: nonempty cell rows
    // form a contiguous block around row 0, and every nonempty row's column
    // range contains column 0. Scanning outward gives the ranges directly
    // and vertices come out already sorted by (i, j), no dedup set needed.
    struct Row {
        long long lo, hi;  // inclusive cell-column range
    };
    auto scan_row = [&cell](long long i) {
        Row r{0, 0};
        while (cell.include(i, r.lo - 1)) --r.lo;
        while (cell.include(i, r.hi + 1)) ++r.hi;
        return r;
    };

    std::vector<Row> rows;   // cell rows row_lo .. row_lo + rows.size() - 1
    long long row_lo = 0;
    {
        std::vector<Row> down;
        for (long long i = -1; cell.include(i, 0); --i) down.push_back(scan_row(i));
        row_lo = -static_cast<long long>(down.size());
        rows.assign(down.rbegin(), down.rend());
        for (long long i = 0; cell.include(i, 0); ++i) rows.push_back(scan_row(i));
    }

    std::vector<Translation> out;
    if (rows.empty()) return out;  // unreachable: cell (0,0) always meets the disk

    // vertex row vi collects the column ranges of cell rows vi-1 and vi,
    // each widened by one on the upper side; both contain column 0, so the
    // union is a single interval
    const long long row_hi = row_lo + static_cast<long long>(rows.size()) - 1;
    for (long long vi = row_lo; vi <= row_hi + 1; ++vi) {
        long long lo = 1, hi = 0;
        if (vi - 1 >= row_lo && vi - 1 <= row_hi) {
            const Row& r = rows[vi - 1 - row_lo];
            lo = r.lo;
            hi = r.hi + 1;
        }
        if (vi >= row_lo && vi <= row_hi) {
            const Row& r = rows[vi - row_lo];
            lo = std::min(lo, r.lo);
            hi = std::max(hi, r.hi + 1);
        }
        for (long long j = lo; j <= hi; ++j)
            out.push_back({D.center.dx + static_cast<double>(vi) * side,
                           D.center.dy + static_cast<double>(j) * side});
    }
    return out;
}

}  // namespace geomatch
