#pragma once

#include <span>
#include <vector>

#include "geomatch/types.hpp"

namespace geomatch {

/// L_p-aggregated cost of a matching at translation t:
/// [ (1/k) sum ||a + t - b||^p ]^(1/p) for finite p, max ||a + t - b|| for
/// p = inf. Evaluated with the largest edge length factored out before
/// exponentiation so arbitrary finite p does not overflow; an all-zero edge
/// set returns 0.
double cost_evaluate(std::span<const Point2> A, std::span<const Point2> B,
                     const Matching& M, Translation t, CostExponent p);

struct NearestSite {
    int index = -1;
    double distance = 0.0;
};

/// Index of the site closest to t. Equal distances resolve to the
/// lexicographically smallest (dx, dy) site, then the smallest index.
NearestSite nearest_site(Translation t, std::span<const Translation> sites);
NearestSite nearest_site(Translation t, const Coords& sites);

/// Smallest disk containing all of P (Welzl, deterministic internal shuffle).
Disk min_enclosing_disk(std::span<const Translation> P);

/// Smallest P-centered disk containing at least h points of P (the center's
/// own point counts). Radius is at most twice the radius of the smallest
/// h-enclosing disk with unconstrained center. Ties resolve to the
/// lexicographically smallest center, then the smallest index.
Disk approx_smallest_hdisk(std::span<const Translation> P, int h);

/// Vertices of every grid cell that meets D, for the grid of the given side
/// length anchored so D.center is a vertex. Cells are half-open
/// [x, x+side) x [y, y+side); the closed disk is tested against them, so each
/// point of D ends up within side/sqrt(2) of a returned vertex. Output is
/// deduplicated and sorted by (dx, dy).
std::vector<Translation> grid_vertices_covering_disk(const Disk& D, double side);

}  // namespace geomatch
