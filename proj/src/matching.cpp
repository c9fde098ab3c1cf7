#include "geomatch/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geomatch/geometry.hpp"
#include "geomatch/kernels.hpp"

namespace geomatch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ExactMatcher::ExactMatcher(std::span<const Point2> A, std::span<const Point2> B,
                           int k, CostExponent p)
    : m_(static_cast<int>(A.size())),
      n_(static_cast<int>(B.size())),
      k_(k),
      p_(p),
      A_(A.begin(), A.end()),
      B_(B.begin(), B.end()),
      bx_(B) {
    if (m_ == 0 || n_ == 0) throw Error("empty point set");
    if (k_ < 1 || k_ > std::min(m_, n_)) throw Error("infeasible size");
    sqd_.resize(static_cast<std::size_t>(m_) * n_);
    if (!p_.is_inf()) {
        cost_.resize(sqd_.size());
        const int source = m_ + n_;
        const int sink = m_ + n_ + 1;
        const int V = m_ + n_ + 2;
        graph_.resize(V);
        auto add_arc = [&](int u, int v, double c) {
            graph_[u].push_back({v, static_cast<int>(graph_[v].size()), 1, c});
            graph_[v].push_back({u, static_cast<int>(graph_[u].size()) - 1, 0, -c});
        };
        for (int i = 0; i < m_; ++i) add_arc(source, i, 0.0);
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < n_; ++j) add_arc(i, m_ + j, 0.0);
        for (int j = 0; j < n_; ++j) add_arc(m_ + j, sink, 0.0);
        dist_.resize(V);
        pot_.resize(V);
        prev_node_.resize(V);
        prev_arc_.resize(V);
        visited_.resize(V);
    } else {
        match_a_.resize(m_);
        match_b_.resize(n_);
        seen_stamp_.assign(n_, -1);
    }
}

void ExactMatcher::build_sq_matrix(Translation t) {
    for (int i = 0; i < m_; ++i)
        kern::sq_dists_to(A_[i].x + t.dx, A_[i].y + t.dy, bx_.x.data(), bx_.y.data(),
                          n_, sqd_.data() + static_cast<std::size_t>(i) * n_);
}

MatchResult ExactMatcher::solve(Translation t) {
    build_sq_matrix(t);
    MatchResult r = p_.is_inf() ? solve_bottleneck(t) : solve_flow(t);
    r.exact = true;
    r.epsilon_used = 0.0;
    return r;
}

MatchResult ExactMatcher::solve_within(Translation t, double eps) {
    if (!(eps >= 0.0)) throw Error("epsilon must be nonnegative");
    MatchResult r = solve(t);
    r.epsilon_used = eps;
    return r;
}

MatchResult ExactMatcher::solve_flow(Translation t) {
    const std::size_t mn = sqd_.size();
    const double max_sq = kern::max_value(sqd_.data(), mn);
    const double pv = p_.value();

    // arc costs in [0,1]: (d / d_max)^p; same argmin, no overflow for any p
    if (max_sq == 0.0) {
        std::fill(cost_.begin(), cost_.end(), 0.0);
    } else if (pv == 1.0) {
        kern::sqrt_array(sqd_.data(), mn, cost_.data());
        const double inv = 1.0 / std::sqrt(max_sq);
        for (std::size_t e = 0; e < mn; ++e) cost_[e] *= inv;
    } else if (pv == 2.0) {
        const double inv = 1.0 / max_sq;
        for (std::size_t e = 0; e < mn; ++e) cost_[e] = sqd_[e] * inv;
    } else if (pv == 3.0) {
        const double inv = 1.0 / max_sq;
        for (std::size_t e = 0; e < mn; ++e) {
            double r2 = sqd_[e] * inv;
            cost_[e] = r2 * std::sqrt(r2);
        }
    } else {
        const double inv = 1.0 / max_sq;
        for (std::size_t e = 0; e < mn; ++e) cost_[e] = std::pow(sqd_[e] * inv, 0.5 * pv);
    }

    const int source = m_ + n_;
    const int sink = m_ + n_ + 1;
    const int V = m_ + n_ + 2;

    // graph built once in the constructor; reset caps and refresh edge costs
    for (auto& arc : graph_[source]) arc.cap = 1;
    for (int i = 0; i < m_; ++i) {
        auto& adj = graph_[i];
        const double* row = cost_.data() + static_cast<std::size_t>(i) * n_;
        // adj[0] is the reverse of source->i; then the n_ forward arcs to B
        adj[0].cap = 0;
        for (int j = 0; j < n_; ++j) {
            adj[j + 1].cap = 1;
            adj[j + 1].cost = row[j];
        }
    }
    for (int j = 0; j < n_; ++j) {
        auto& adj = graph_[m_ + j];
        for (int i = 0; i < m_; ++i) {
            adj[i].cap = 0;  // reverse of i -> B_j
            adj[i].cost = -cost_[static_cast<std::size_t>(i) * n_ + j];
        }
        adj[m_].cap = 1;  // B_j -> sink
    }
    for (auto& arc : graph_[sink]) arc.cap = 0;

    std::fill(pot_.begin(), pot_.end(), 0.0);
    for (int phase = 0; phase < k_; ++phase) {
        std::fill(dist_.begin(), dist_.end(), kInf);
        std::fill(visited_.begin(), visited_.end(), 0);
        dist_[source] = 0.0;
        for (int it = 0; it < V; ++it) {
            int u = -1;
            for (int x = 0; x < V; ++x)
                if (!visited_[x] && dist_[x] < kInf && (u < 0 || dist_[x] < dist_[u]))
                    u = x;
            if (u < 0) break;
            visited_[u] = 1;
            if (u == sink) break;
            for (std::size_t a = 0; a < graph_[u].size(); ++a) {
                const Arc& arc = graph_[u][a];
                if (arc.cap <= 0 || visited_[arc.to]) continue;
                double w = arc.cost + pot_[u] - pot_[arc.to];
                if (w < 0.0) w = 0.0;  // rounding guard; exact reduced costs are >= 0
                double nd = dist_[u] + w;
                if (nd < dist_[arc.to]) {
                    dist_[arc.to] = nd;
                    prev_node_[arc.to] = u;
                    prev_arc_[arc.to] = static_cast<int>(a);
                }
            }
        }
        const double reach = dist_[sink];
        for (int x = 0; x < V; ++x) pot_[x] += std::min(dist_[x], reach);
        for (int v = sink; v != source; v = prev_node_[v]) {
            Arc& fwd = graph_[prev_node_[v]][prev_arc_[v]];
            fwd.cap -= 1;
            graph_[v][fwd.rev].cap += 1;
        }
    }

    MatchResult res;
    for (int i = 0; i < m_; ++i)
        for (const Arc& arc : graph_[i])
            if (arc.to >= m_ && arc.to < m_ + n_ && arc.cap == 0)
                res.matching.pairs.emplace_back(i, arc.to - m_);
    res.matching.canonicalize();
    res.cost = cost_evaluate(A_, B_, res.matching, t, p_);
    return res;
}

bool ExactMatcher::kuhn_augment(int row, double thr_sq) {
    const double* d = sqd_.data() + static_cast<std::size_t>(row) * n_;
    for (int j = 0; j < n_; ++j) {
        if (d[j] > thr_sq || seen_stamp_[j] == stamp_) continue;
        seen_stamp_[j] = stamp_;
        if (match_b_[j] < 0 || kuhn_augment(match_b_[j], thr_sq)) {
            match_a_[row] = j;
            match_b_[j] = row;
            return true;
        }
    }
    return false;
}

bool ExactMatcher::threshold_feasible(double thr_sq) {
    std::fill(match_a_.begin(), match_a_.end(), -1);
    std::fill(match_b_.begin(), match_b_.end(), -1);
    int count = 0;
    for (int i = 0; i < m_ && count < k_; ++i) {
        ++stamp_;
        if (kuhn_augment(i, thr_sq)) ++count;
    }
    return count >= k_;
}

MatchResult ExactMatcher::solve_bottleneck(Translation t) {
    thr_values_ = sqd_;
    std::sort(thr_values_.begin(), thr_values_.end());
    thr_values_.erase(std::unique(thr_values_.begin(), thr_values_.end()),
                      thr_values_.end());

    std::size_t lo = 0, hi = thr_values_.size() - 1;
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (threshold_feasible(thr_values_[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    threshold_feasible(thr_values_[lo]);  // rebuild the witness matching

    MatchResult res;
    for (int i = 0; i < m_ && res.matching.size() < k_; ++i)
        if (match_a_[i] >= 0) res.matching.pairs.emplace_back(i, match_a_[i]);
    res.matching.canonicalize();
    res.cost = cost_evaluate(A_, B_, res.matching, t, p_);
    return res;
}

MatchResult solve_exact(std::span<const Point2> A, std::span<const Point2> B, int k,
                        CostExponent p, Translation t) {
    return ExactMatcher(A, B, k, p).solve(t);
}

MatchResult solve_within(std::span<const Point2> A, std::span<const Point2> B, int k,
                         CostExponent p, Translation t, double eps) {
    return ExactMatcher(A, B, k, p).solve_within(t, eps);
}

double brute_force_candidate_count(int m, int n, int k) {
    auto choose = [](int a, int b) {
        double r = 1.0;
        for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return choose(m, k) * choose(n, k) * fact;
}

namespace {

// next k-combination of {0..limit-1} in lexicographic order
bool next_combination(std::vector<int>& c, int limit) {
    const int k = static_cast<int>(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[i] < limit - (k - i)) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

MatchResult brute_force_oracle(std::span<const Point2> A, std::span<const Point2> B,
                               int k, CostExponent p, Translation t) {
    const int m = static_cast<int>(A.size());
    const int n = static_cast<int>(B.size());
    if (m == 0 || n == 0) throw Error("empty point set");
    if (k < 1 || k > std::min(m, n)) throw Error("infeasible size");
    if (brute_force_candidate_count(m, n, k) > 1e7)
        throw Error("instance too large for oracle");

    // per-edge solver weights: max of sq for p=inf, (d/dmax)^p otherwise
    std::vector<double> w(static_cast<std::size_t>(m) * n);
    Coords bc{B};
    for (int i = 0; i < m; ++i)
        kern::sq_dists_to(A[i].x + t.dx, A[i].y + t.dy, bc.x.data(), bc.y.data(), n,
                          w.data() + static_cast<std::size_t>(i) * n);
    if (!p.is_inf()) {
        const double max_sq = kern::max_value(w.data(), w.size());
        if (max_sq > 0.0) {
            const double pv = p.value();
            for (auto& e : w) e = std::pow(e / max_sq, 0.5 * pv);
        }
    }

    const bool bottleneck = p.is_inf();
    double best_val = kInf;
    std::vector<std::pair<int, int>> best_pairs, cur_pairs(k);

    std::vector<int> asel(k), bsel(k), perm(k);
    for (int i = 0; i < k; ++i) asel[i] = i;
    do {
        std::vector<int> binit(k);
        for (int i = 0; i < k; ++i) binit[i] = i;
        bsel = binit;
        do {
            perm = bsel;
            std::sort(perm.begin(), perm.end());
            do {
                double val = 0.0;
                for (int i = 0; i < k; ++i) {
                    double e = w[static_cast<std::size_t>(asel[i]) * n + perm[i]];
                    if (bottleneck)
                        val = std::max(val, e);
                    else
                        val += e;
                }
                if (val > best_val) continue;
                for (int i = 0; i < k; ++i) cur_pairs[i] = {asel[i], perm[i]};
                if (val < best_val || cur_pairs < best_pairs) {
                    best_val = val;
                    best_pairs = cur_pairs;
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
        } while (next_combination(bsel, n));
    } while (next_combination(asel, m));

    MatchResult res;
    res.matching.pairs = best_pairs;
    res.cost = cost_evaluate(A, B, res.matching, t, p);
    return res;
}

}  // namespace geomatch
