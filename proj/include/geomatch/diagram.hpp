#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "geomatch/search.hpp"
#include "geomatch/types.hpp"

namespace geomatch {

enum class DiagramKind { Voronoi3, EpsT, EpsCluster };

const char* diagram_kind_name(DiagramKind k);

enum class FaceRegion { CentralCell, AnnulusCell, Outer };

/// One face of the diagram. Cell faces are squares
/// [site + i*side, site + (i+1)*side) x [ ... j ... ) of the level's grid;
/// the Outer face is everything beyond the outermost square (and the whole
/// Voronoi cell for unrefined diagrams or zero-cost sites).
struct DiagramFace {
    int site_index = -1;
    FaceRegion region = FaceRegion::Outer;
    int level = -1;          // 0 = central grid, 1..u = annulus grids
    long long ci = 0, cj = 0;
    Translation center;      // cell center; the site itself for Outer
    Matching matching;
};

struct QueryResult {
    DiagramFace face;
    double cost = 0.0;  // cost of the face matching at the query point
};

struct VerifyReport {
    double max_ratio = 0.0;
    std::int64_t samples = 0;  // samples that contributed a ratio
    Translation worst_query;
};

/// Queryable approximate matching diagram over the translation plane.
///
/// Point location is arithmetic: nearest site, then (for refined diagrams)
/// the smallest dyadic square around that site containing the query and the
/// half-open grid cell inside it. Face matchings are solved on first touch
/// and memoized; concurrent queries fill each face exactly once.
///
/// Three builds:
///   - voronoi3: Voronoi cells of the point-to-point set, one matching per
///     cell, factor 3(1+delta);
///   - eps (EpsT / EpsCluster with refine): nested grids of u+1 levels per
///     site, factor 1+eps (eps rounded down to a power of two);
///   - cluster_voronoi: Voronoi cells of the cluster centers, factor
///     (1 + 6*2^(1/p))(1+delta), the unrefined variant.
class MatchingDiagram {
  public:
    static MatchingDiagram build_voronoi3(std::span<const Point2> A,
                                          std::span<const Point2> B, int k,
                                          CostExponent p, double delta);
    static MatchingDiagram build_cluster_voronoi(std::span<const Point2> A,
                                                 std::span<const Point2> B, int k,
                                                 CostExponent p, double delta);
    static MatchingDiagram build_eps(std::span<const Point2> A,
                                     std::span<const Point2> B, int k, CostExponent p,
                                     double eps, DiagramKind site_kind);

    QueryResult query(Translation t, std::span<const Point2> A,
                      std::span<const Point2> B) const;

    /// Closed-form upper bound on the number of faces (grid cells per level
    /// plus up to 4 outer components per site; clipping by the Voronoi cell
    /// is not subtracted).
    std::int64_t face_count_bound() const;

    /// Samples the plane (uniform over the inflated site box, plus
    /// perturbations near sites and near level boundaries) and reports the
    /// worst cost(M_face, t) / optcost(t), solving optcost exactly per
    /// sample. Samples with optcost < 1e-12 are skipped once the face cost
    /// is verified to be < 1e-9 there.
    VerifyReport verify(std::span<const Point2> A, std::span<const Point2> B,
                        int sample_count, std::uint64_t seed) const;

    std::string to_json() const;
    static MatchingDiagram from_json(const std::string& text);
    void save(const std::string& path) const;
    static MatchingDiagram load(const std::string& path);

    DiagramKind kind() const { return kind_; }
    double eps() const { return eps_; }
    double delta() const { return delta_; }
    double guarantee_factor() const { return guarantee_; }
    int level_count() const { return levels_; }
    int cells_per_side() const { return cells_per_side_; }
    int k() const { return k_; }
    CostExponent p() const { return p_; }
    std::uint64_t instance_hash_value() const { return hash_; }
    const CandidateSet& sites() const { return sites_; }
    /// Cost solved at each site (defines the square sizes); NaN while a lazy
    /// site is still unsolved.
    std::vector<double> base_values() const;
    std::int64_t memoized_face_count() const;

    MatchingDiagram(MatchingDiagram&&) noexcept = default;
    MatchingDiagram& operator=(MatchingDiagram&&) noexcept = default;

  private:
    MatchingDiagram() = default;

    struct FaceKey {
        int site;
        int level;  // -1 = outer / whole cell
        long long i, j;
        auto operator<=>(const FaceKey&) const = default;
    };
    struct FaceEntry {
        std::mutex fill;
        bool ready = false;
        Matching matching;
    };

    DiagramFace locate(Translation t) const;
    const Matching& face_matching(const FaceKey& key, Translation center,
                                  std::span<const Point2> A,
                                  std::span<const Point2> B) const;
    Translation face_center(const FaceKey& key) const;
    double level_side(int site, int level) const;
    void check_instance(std::span<const Point2> A, std::span<const Point2> B) const;

    DiagramKind kind_ = DiagramKind::Voronoi3;
    bool refined_ = false;
    double eps_ = 0.0;    // rounded value; 0 for unrefined diagrams
    double delta_ = 0.0;  // epsilon passed to the per-face solver
    double guarantee_ = 3.0;
    int levels_ = 0;          // u
    int cells_per_side_ = 0;  // per dyadic square, refined diagrams only
    int k_ = 1;
    CostExponent p_ = CostExponent::finite(1.0);
    std::uint64_t hash_ = 0;
    CandidateSet sites_;
    mutable std::vector<double> base_;

    mutable std::unique_ptr<std::mutex> table_mu_ = std::make_unique<std::mutex>();
    mutable std::map<FaceKey, std::unique_ptr<FaceEntry>> faces_;
};

struct L2EnvelopeResult {
    int site_index = -1;
    Matching matching;
};

/// p = 2 only: returns the site whose matching minimizes the RMS cost at s,
/// found by minimizing the linear functions
/// 2*sum <a-b, s> + sum ||a-b||^2 (ties: smallest site index).
L2EnvelopeResult l2_envelope_query(std::span<const Translation> sites,
                                   std::span<const Matching> site_matchings,
                                   Translation s, std::span<const Point2> A,
                                   std::span<const Point2> B, int k, CostExponent p);

/// Voronoi cell of sites[index] clipped to clip_box, as a convex polygon
/// (counterclockwise vertex list; the full box for a single site).
std::vector<Translation> voronoi_cell_polygon(std::span<const Translation> sites,
                                              int index, const Box& clip_box);

}  // namespace geomatch
