#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "geomatch/matching.hpp"
#include "geomatch/types.hpp"

namespace geomatch {

enum class CandidateKind { PointToPoint, ClusterCenters };

/// Finite candidate set in the translation plane: either all point-to-point
/// differences b - a, or greedy cluster-disk centers thereof.
struct CandidateSet {
    std::vector<Translation> translations;
    CandidateKind kind = CandidateKind::PointToPoint;
    std::vector<double> radii;  // per-center disk radius; cluster sets only
    Coords coords;              // SoA mirror for the kernels

    int size() const { return static_cast<int>(translations.size()); }
    void rebuild_coords() { coords = Coords(std::span<const Translation>(translations)); }
};

enum class Algorithm { Exhaustive, EpsGrid, RandomSample, ClusterGrid };

const char* algorithm_name(Algorithm a);

struct SearchResult {
    Translation translation;
    Matching matching;
    double cost = 0.0;
    Algorithm algorithm = Algorithm::Exhaustive;
    std::int64_t candidates_evaluated = 0;
    /// Claimed multiplicative bound on cost versus the optimum over all
    /// translations.
    double guarantee_factor = 1.0;
};

/// All differences b - a, exactly deduplicated, in (a-major, b-minor)
/// first-seen order.
CandidateSet build_point_to_point_set(std::span<const Point2> A,
                                      std::span<const Point2> B);

/// Greedy disk clustering of T with h = ceil(k/2): repeatedly take the
/// 2-approximate smallest h-enclosing disk (the exact enclosing disk once at
/// most h points remain), record its center, drop the covered points.
/// At most max(1, ceil(2|T|/k)) centers come out.
CandidateSet build_cluster_centers(const CandidateSet& T, int k);

/// Best matching over all point-to-point translations. Guarantee factor
/// 2(1+delta), improved to sqrt(2)(1+delta) for p = 2.
SearchResult const_factor_search(std::span<const Point2> A, std::span<const Point2> B,
                                 int k, CostExponent p, double delta);

/// (1+eps)-approximate optimum: constant-factor bootstrap, then a grid of
/// side eps*sqrt(2)*r0/18 over a disk of radius r0 = 2*bootstrap around each
/// point-to-point translation.
SearchResult eps_optimum_search(std::span<const Point2> A, std::span<const Point2> B,
                                int k, CostExponent p, double eps);

/// Lower bound on how many pairs of any k-matching of cost mu are shorter
/// than (1+c)*mu: k - k/(1+c)^p (k itself for p = inf).
double close_pair_count_bound(int k, double c, CostExponent p);

/// Success probability of random_sample_search with s draws:
/// 1 - (1 - (1 - e^(-eps*p/8)) * k/m)^s, clamped to [0,1].
double success_probability_bound(int m, int k, CostExponent p, double eps, int s);

/// s seeded draws of a random a0 in A, each sweeping the n translations
/// b - a0. (2+eps)-approximate with the probability bound above; bit-identical
/// replay for a fixed seed.
SearchResult random_sample_search(std::span<const Point2> A, std::span<const Point2> B,
                                  int k, CostExponent p, double eps, int s,
                                  std::uint64_t seed);

/// (1+eps)-approximate optimum via cluster centers: sweep X for a
/// constant-factor value v, then grid the disk of radius
/// (1 + 3*2^(1/p) + 4*eps)*v around each center with cells fine enough that
/// every disk point is within (eps/3)*v_low of a vertex.
SearchResult disk_eating_search(std::span<const Point2> A, std::span<const Point2> B,
                                int k, CostExponent p, double eps, double delta = 1.0);

}  // namespace geomatch
