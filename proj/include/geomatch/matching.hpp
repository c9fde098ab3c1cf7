#pragma once

#include <span>
#include <vector>

#include "geomatch/types.hpp"

namespace geomatch {

struct MatchResult {
    Matching matching;
    double cost = 0.0;
    bool exact = true;
    double epsilon_used = 0.0;
};

/// Minimum-cost k-matching solver bound to one instance (A, B, k, p).
/// Construct once, then solve at many translations; the per-translation work
/// reuses the internal cost matrix and flow scratch, so candidate sweeps stay
/// cheap. Each instance owns its scratch: use one matcher per thread.
///
/// Finite p runs successive shortest paths on the complete bipartite flow
/// network (source->a cap 1 cost 0, a->b cap 1 cost ||a+t-b||^p, b->sink
/// cap 1 cost 0) with Dijkstra over reduced costs, k augmentations. Edge
/// costs are scaled by the largest pairwise distance before exponentiation.
/// p = inf binary-searches the sorted pairwise distances, testing each
/// threshold with an augmenting-path matching stopped at size k.
///
/// The reported cost always comes from cost_evaluate on the returned pairs.
class ExactMatcher {
  public:
    ExactMatcher(std::span<const Point2> A, std::span<const Point2> B, int k,
                 CostExponent p);

    MatchResult solve(Translation t);
    /// Same matching; records the (1+eps) budget the caller asked for.
    MatchResult solve_within(Translation t, double eps);

    int m() const { return m_; }
    int n() const { return n_; }
    int k() const { return k_; }

  private:
    void build_sq_matrix(Translation t);
    MatchResult solve_flow(Translation t);
    MatchResult solve_bottleneck(Translation t);
    bool threshold_feasible(double thr_sq);
    bool kuhn_augment(int row, double thr_sq);

    int m_, n_, k_;
    CostExponent p_;
    std::vector<Point2> A_, B_;
    Coords bx_;

    std::vector<double> sqd_;   // m x n squared distances at current t
    std::vector<double> cost_;  // m x n flow arc costs (finite p)

    // flow network scratch (nodes: 0..m-1 = A, m..m+n-1 = B, m+n = source,
    // m+n+1 = sink)
    struct Arc {
        int to;
        int rev;
        int cap;
        double cost;
    };
    std::vector<std::vector<Arc>> graph_;
    std::vector<double> dist_, pot_;
    std::vector<int> prev_node_, prev_arc_;
    std::vector<char> visited_;

    // bottleneck scratch
    std::vector<int> match_a_, match_b_;
    std::vector<std::int64_t> seen_stamp_;
    std::int64_t stamp_ = 0;
    std::vector<double> thr_values_;
};

/// One-shot wrappers.
MatchResult solve_exact(std::span<const Point2> A, std::span<const Point2> B, int k,
                        CostExponent p, Translation t);
MatchResult solve_within(std::span<const Point2> A, std::span<const Point2> B, int k,
                         CostExponent p, Translation t, double eps);

/// Number of k-matchings a brute-force enumeration visits:
/// C(m,k) * C(n,k) * k!.
double brute_force_candidate_count(int m, int n, int k);

/// Enumerates every k-matching and returns the cheapest (ties: smallest
/// lexicographic pair list). Refuses instances with more than 1e7 candidates.
MatchResult brute_force_oracle(std::span<const Point2> A, std::span<const Point2> B,
                               int k, CostExponent p, Translation t);

}  // namespace geomatch
