#include "geomatch/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "geomatch/geometry.hpp"
#include "geomatch/kernels.hpp"
#include "geomatch/parallel.hpp"
#include "geomatch/prng.hpp"

namespace geomatch {

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Exhaustive: return "exhaustive";
        case Algorithm::EpsGrid: return "grid";
        case Algorithm::RandomSample: return "random";
        case Algorithm::ClusterGrid: return "cluster";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t pack_bits(Translation t) {
    std::uint64_t x, y;
    static_assert(sizeof(double) == 8);
    std::memcpy(&x, &t.dx, 8);
    std::memcpy(&y, &t.dy, 8);
    return x ^ (y * 0x9E3779B97F4A7C15ull + 0x165667B19E3779F9ull);
}

struct BitEqual {
    bool operator()(const Translation& a, const Translation& b) const {
        return bit_equal(a, b);
    }
};
struct BitHash {
    std::size_t operator()(const Translation& t) const {
        return static_cast<std::size_t>(pack_bits(t));
    }
};

/// Best candidate under the deterministic total order
/// (cost, translation lex, global candidate index).
struct BestCand {
    double cost = kInf;
    Translation t;
    Matching matching;
    std::int64_t index = -1;

    bool beats(const BestCand& o) const {
        if (index < 0) return false;
        if (o.index < 0) return true;
        if (cost != o.cost) return cost < o.cost;
        if (!bit_equal(t, o.t)) return lex_less(t, o.t);
        return index < o.index;
    }
};

/// Evaluates a batch of candidate translations in parallel and folds it into
/// best. Indices start at index_base so ties stay globally ordered across
/// batches.
void evaluate_batch(std::span<const Point2> A, std::span<const Point2> B, int k,
                    CostExponent p, std::span<const Translation> cands,
                    std::int64_t index_base, BestCand& best) {
    const std::int64_t n = static_cast<std::int64_t>(cands.size());
    if (n == 0) return;
    const int nc = plan_chunks(n, 256);
    std::vector<BestCand> local(static_cast<std::size_t>(std::max(nc, 1)));
    parallel_chunks(n, 256, [&](int chunk, std::int64_t lo, std::int64_t hi) {
        ExactMatcher matcher(A, B, k, p);
        BestCand acc;
        for (std::int64_t i = lo; i < hi; ++i) {
            MatchResult r = matcher.solve(cands[i]);
            BestCand cand{r.cost, cands[i], std::move(r.matching), index_base + i};
            if (cand.beats(acc)) acc = std::move(cand);
        }
        local[chunk] = std::move(acc);
    });
    for (auto& lc : local)
        if (lc.beats(best)) best = std::move(lc);
}

SearchResult finish(BestCand&& best, Algorithm algo, std::int64_t evaluated,
                    double guarantee) {
    SearchResult r;
    r.translation = best.t;
    r.matching = std::move(best.matching);
    r.cost = best.cost;
    r.algorithm = algo;
    r.candidates_evaluated = evaluated;
    r.guarantee_factor = guarantee;
    return r;
}

double two_pow_inv(CostExponent p) {
    return p.is_inf() ? 1.0 : std::pow(2.0, 1.0 / p.value());
}

}  // namespace

CandidateSet build_point_to_point_set(std::span<const Point2> A,
                                      std::span<const Point2> B) {
    if (A.empty() || B.empty()) throw Error("empty point set");
    CandidateSet set;
    set.kind = CandidateKind::PointToPoint;
    std::unordered_set<Translation, BitHash, BitEqual> seen;
    seen.reserve(A.size() * B.size());
    for (const auto& a : A)
        for (const auto& b : B) {
            Translation t = (b - a).canonical();
            if (seen.insert(t).second) set.translations.push_back(t);
        }
    set.rebuild_coords();
    return set;
}

CandidateSet build_cluster_centers(const CandidateSet& T, int k) {
    if (T.translations.empty()) throw Error("empty candidate set");
    if (k < 1) throw Error("infeasible size");
    const int h = (k + 1) / 2;

    CandidateSet X;
    X.kind = CandidateKind::ClusterCenters;
    std::vector<Translation> alive = T.translations;
    std::vector<double> sq, sel;
    while (!alive.empty()) {
        Disk d;
        bool last = static_cast<int>(alive.size()) <= h;
        if (last) {
            d = min_enclosing_disk(alive);
        } else {
            d = approx_smallest_hdisk(alive, h);
        }
        // centers repeat only through arithmetic coincidences; keep the first
        bool dup = false;
        for (const auto& c : X.translations)
            if (bit_equal(c, d.center)) dup = true;
        if (!dup) {
            X.translations.push_back(d.center);
            X.radii.push_back(d.radius);
        }
        if (last) break;
        // threshold on the exact h-th smallest squared distance from the
        // center, so at least h points leave every round (the disk radius
        // itself went through a sqrt and can round below it)
        sq.resize(alive.size());
        Coords ac{std::span<const Translation>(alive)};
        kern::sq_dists_to(d.center.dx, d.center.dy, ac.x.data(), ac.y.data(),
                          alive.size(), sq.data());
        sel = sq;
        std::nth_element(sel.begin(), sel.begin() + (h - 1), sel.end());
        const double r2 = sel[h - 1];
        std::vector<Translation> next;
        next.reserve(alive.size());
        for (std::size_t i = 0; i < alive.size(); ++i)
            if (sq[i] > r2) next.push_back(alive[i]);
        alive = std::move(next);
    }
    X.rebuild_coords();
    return X;
}

SearchResult const_factor_search(std::span<const Point2> A, std::span<const Point2> B,
                                 int k, CostExponent p, double delta) {
    if (!(delta >= 0.0)) throw Error("delta must be nonnegative");
    CandidateSet T = build_point_to_point_set(A, B);
    BestCand best;
    evaluate_batch(A, B, k, p, T.translations, 0, best);
    const double factor = (p.is_two() ? std::sqrt(2.0) : 2.0) * (1.0 + delta);
    return finish(std::move(best), Algorithm::Exhaustive, T.size(), factor);
}

SearchResult eps_optimum_search(std::span<const Point2> A, std::span<const Point2> B,
                                int k, CostExponent p, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw Error("eps must be in (0,1]");
    CandidateSet T = build_point_to_point_set(A, B);

    BestCand best;
    evaluate_batch(A, B, k, p, T.translations, 0, best);
    std::int64_t evaluated = T.size();
    if (best.cost == 0.0)
        return finish(std::move(best), Algorithm::EpsGrid, evaluated, 1.0 + eps);

    const double r0 = 2.0 * best.cost;  // in [2 opt, 6 opt]: bootstrap is a 3-approx
    const double side = eps * std::sqrt(2.0) * r0 / 18.0;
    for (const Translation& t0 : T.translations) {
        std::vector<Translation> verts = grid_vertices_covering_disk({t0, r0}, side);
        evaluate_batch(A, B, k, p, verts, evaluated, best);
        evaluated += static_cast<std::int64_t>(verts.size());
    }
    return finish(std::move(best), Algorithm::EpsGrid, evaluated, 1.0 + eps);
}

double close_pair_count_bound(int k, double c, CostExponent p) {
    if (k < 1) throw Error("k must be positive");
    if (!(c > 0.0 && c <= 1.0)) throw Error("c must be in (0,1]");
    if (p.is_inf()) return static_cast<double>(k);
    return k - k / std::pow(1.0 + c, p.value());
}

double success_probability_bound(int m, int k, CostExponent p, double eps, int s) {
    if (k < 1 || k > m) throw Error("need 1 <= k <= m");
    if (s < 1) throw Error("need s >= 1");
    if (!(eps > 0.0 && eps <= 1.0)) throw Error("eps must be in (0,1]");
    const double decay = p.is_inf() ? 0.0 : std::exp(-eps * p.value() / 8.0);
    const double per_trial = (1.0 - decay) * static_cast<double>(k) / m;
    const double v = 1.0 - std::pow(1.0 - per_trial, s);
    return std::clamp(v, 0.0, 1.0);
}

SearchResult random_sample_search(std::span<const Point2> A, std::span<const Point2> B,
                                  int k, CostExponent p, double eps, int s,
                                  std::uint64_t seed) {
    if (s < 1) throw Error("need s >= 1");
    if (!(eps > 0.0 && eps <= 1.0)) throw Error("eps must be in (0,1]");
    if (A.empty() || B.empty()) throw Error("empty point set");

    SplitMix64 rng(seed);
    std::vector<int> draws(s);
    for (int i = 0; i < s; ++i)
        draws[i] = static_cast<int>(rng.next_below(A.size()));

    BestCand best;
    std::int64_t evaluated = 0;
    std::vector<Translation> batch(B.size());
    for (int trial = 0; trial < s; ++trial) {
        const Point2 a0 = A[draws[trial]];
        for (std::size_t j = 0; j < B.size(); ++j) batch[j] = (B[j] - a0).canonical();
        evaluate_batch(A, B, k, p, batch, evaluated, best);
        evaluated += static_cast<std::int64_t>(batch.size());
    }
    return finish(std::move(best), Algorithm::RandomSample, evaluated, 2.0 + eps);
}

SearchResult disk_eating_search(std::span<const Point2> A, std::span<const Point2> B,
                                int k, CostExponent p, double eps, double delta) {
    if (!(eps > 0.0 && eps <= 1.0)) throw Error("eps must be in (0,1]");
    if (!(delta >= 0.0)) throw Error("delta must be nonnegative");

    CandidateSet T = build_point_to_point_set(A, B);
    CandidateSet X = build_cluster_centers(T, k);

    // The pair-count argument behind the cluster sweep speaks about pairs,
    // but T is deduplicated: a translation aligning ceil(k/2) or more pairs
    // at once (a zero-cost alignment in the extreme) collapses to a single
    // point the greedy disks may miss. Probe those translations directly;
    // there are at most 2mn/k of them, the same budget as X.
    const int h = (k + 1) / 2;
    std::vector<Translation> probes;
    {
        std::unordered_map<Translation, int, BitHash, BitEqual> mult;
        for (const auto& a : A)
            for (const auto& b : B) ++mult[(b - a).canonical()];
        for (const Translation& t0 : T.translations)
            if (mult[t0] >= h) probes.push_back(t0);
    }

    BestCand best;
    evaluate_batch(A, B, k, p, X.translations, 0, best);
    evaluate_batch(A, B, k, p, probes, X.size(), best);
    std::int64_t evaluated = X.size() + static_cast<std::int64_t>(probes.size());
    const double v = best.cost;
    if (v == 0.0)
        return finish(std::move(best), Algorithm::ClusterGrid, evaluated, 1.0 + eps);

    const double lam = 3.0 * two_pow_inv(p);        // nearest-center stretch
    const double radius = (1.0 + lam + 4.0 * eps) * v;
    const double v_low = v / ((1.0 + lam) * (1.0 + delta));  // <= optimum
    const double side = std::sqrt(2.0) * eps * v_low / 3.0;
    for (const Translation& xi : X.translations) {
        std::vector<Translation> verts = grid_vertices_covering_disk({xi, radius}, side);
        evaluate_batch(A, B, k, p, verts, evaluated, best);
        evaluated += static_cast<std::int64_t>(verts.size());
    }
    return finish(std::move(best), Algorithm::ClusterGrid, evaluated, 1.0 + eps);
}

}  // namespace geomatch
