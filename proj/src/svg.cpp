#include "geomatch/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <sstream>

namespace geomatch {

namespace {

struct Mapper {
    Box world;
    double canvas;

    double sx(double x) const {
        return (x - world.xmin) / (world.xmax - world.xmin) * canvas;
    }
    double sy(double y) const {
        // flip: SVG y grows downward
        return (world.ymax - y) / (world.ymax - world.ymin) * canvas;
    }
};

void append(std::ostringstream& out, const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, ap);
    va_end(ap);
    out << buf;
}

}  // namespace

std::string export_svg(const MatchingDiagram& diagram, const SvgOptions& options) {
    const auto& ts = diagram.sites().translations;
    Box box{ts[0].dx, ts[0].dy, ts[0].dx, ts[0].dy};
    for (const auto& s : ts) {
        box.xmin = std::min(box.xmin, s.dx);
        box.xmax = std::max(box.xmax, s.dx);
        box.ymin = std::min(box.ymin, s.dy);
        box.ymax = std::max(box.ymax, s.dy);
    }
    double w = std::max(box.width(), 1e-9);
    double h = std::max(box.height(), 1e-9);
    const double side = std::max(w, h);
    const double cx = 0.5 * (box.xmin + box.xmax);
    const double cy = 0.5 * (box.ymin + box.ymax);
    // square drawing area, 10% inflation
    Box world{cx - 0.55 * side, cy - 0.55 * side, cx + 0.55 * side, cy + 0.55 * side};
    Mapper map{world, options.canvas};

    std::ostringstream out;
    append(out,
           "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
           "viewBox=\"0 0 %.0f %.0f\">\n",
           options.canvas, options.canvas);
    append(out, "<rect x=\"0\" y=\"0\" width=\"%.0f\" height=\"%.0f\" fill=\"white\"/>\n",
           options.canvas, options.canvas);

    // Voronoi cells
    for (std::size_t i = 0; i < ts.size(); ++i) {
        auto poly = voronoi_cell_polygon(ts, static_cast<int>(i), world);
        if (poly.empty()) continue;
        out << "<polygon class=\"vcell\" points=\"";
        for (const auto& v : poly) append(out, "%.3f,%.3f ", map.sx(v.dx), map.sy(v.dy));
        out << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    }

    // nested squares and grids of refined diagrams
    if (diagram.level_count() > 0) {
        const auto bases = diagram.base_values();
        for (std::size_t s = 0; s < ts.size(); ++s) {
            const double v0 = bases[s];
            if (std::isnan(v0) || v0 == 0.0) continue;
            const int nc = diagram.cells_per_side();
            for (int level = 0; level <= diagram.level_count(); ++level) {
                const double cell = std::ldexp(diagram.eps() * v0, level - 3);
                const double half = 0.5 * nc * cell;
                append(out,
                       "<rect class=\"bsquare\" x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" "
                       "height=\"%.3f\" fill=\"none\" stroke=\"#1f77b4\" "
                       "stroke-width=\"1\"/>\n",
                       map.sx(ts[s].dx - half), map.sy(ts[s].dy + half),
                       2.0 * half / (world.xmax - world.xmin) * options.canvas,
                       2.0 * half / (world.ymax - world.ymin) * options.canvas);
                if (!options.draw_grid || nc > options.max_grid_cells) continue;
                for (int g = -nc / 2; g <= nc / 2; ++g) {
                    const double o = g * cell;
                    append(out,
                           "<line class=\"gridline\" x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" "
                           "y2=\"%.3f\" stroke=\"#cfe0ef\" stroke-width=\"0.4\"/>\n",
                           map.sx(ts[s].dx + o), map.sy(ts[s].dy - half),
                           map.sx(ts[s].dx + o), map.sy(ts[s].dy + half));
                    append(out,
                           "<line class=\"gridline\" x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" "
                           "y2=\"%.3f\" stroke=\"#cfe0ef\" stroke-width=\"0.4\"/>\n",
                           map.sx(ts[s].dx - half), map.sy(ts[s].dy + o),
                           map.sx(ts[s].dx + half), map.sy(ts[s].dy + o));
                }
            }
        }
    }

    // sites on top
    for (const auto& s : ts)
        append(out, "<circle class=\"site\" cx=\"%.3f\" cy=\"%.3f\" r=\"3\" fill=\"#d62728\"/>\n",
               map.sx(s.dx), map.sy(s.dy));

    out << "</svg>\n";
    return out.str();
}

}  // namespace geomatch
