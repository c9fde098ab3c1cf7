#pragma once

#include <string>

#include "geomatch/diagram.hpp"

namespace geomatch {

struct SvgOptions {
    double canvas = 1000.0;   // viewBox is canvas x canvas
    bool draw_grid = true;    // per-site nested grid lines (refined diagrams)
    int max_grid_cells = 64;  // skip grid lines beyond this density
};

/// Renders the diagram: site markers, Voronoi cell polygons, the nested
/// squares of refined diagrams (class "bsquare") and their grid lines. The
/// drawing area is the bounding box of the sites inflated by 10%, mapped to
/// the viewBox. Valid SVG 1.1.
std::string export_svg(const MatchingDiagram& diagram, const SvgOptions& options = {});

}  // namespace geomatch
