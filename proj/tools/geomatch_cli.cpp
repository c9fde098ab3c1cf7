// geomatch command line: instance generation, fixed-translation solves,
// translation search, diagram build/query/verify and SVG export.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "geomatch/diagram.hpp"
#include "geomatch/geometry.hpp"
#include "geomatch/instance.hpp"
#include "geomatch/matching.hpp"
#include "geomatch/search.hpp"
#include "geomatch/svg.hpp"

namespace {

using namespace geomatch;

Translation parse_translation(const std::string& spec) {
    auto comma = spec.find(',');
    if (comma == std::string::npos)
        throw Error("translation must be 'dx,dy'");
    try {
        std::size_t used = 0;
        double dx = std::stod(spec.substr(0, comma), &used);
        if (used != comma) throw Error("");
        std::string rest = spec.substr(comma + 1);
        double dy = std::stod(rest, &used);
        if (used != rest.size()) throw Error("");
        return {dx, dy};
    } catch (const std::exception&) {
        throw Error("translation must be 'dx,dy'");
    }
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

nlohmann::json matching_json(const Matching& m) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [a, b] : m.pairs) pairs.push_back({a, b});
    return pairs;
}

nlohmann::json search_result_json(const SearchResult& r) {
    nlohmann::json j;
    j["algorithm"] = algorithm_name(r.algorithm);
    j["candidatesEvaluated"] = r.candidates_evaluated;
    j["cost"] = r.cost;
    j["guaranteeFactor"] = r.guarantee_factor;
    j["matching"] = matching_json(r.matching);
    j["translation"] = {r.translation.dx, r.translation.dy};
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"partial point-set matching under translation"};
    app.require_subcommand(1);

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "minimum-cost k-matching at a fixed translation");
    std::string solve_instance, solve_t = "0,0";
    bool solve_oracle = false, solve_exact_flag = false;
    solve->add_option("--instance", solve_instance, "instance file")->required();
    solve->add_option("--t", solve_t, "translation 'dx,dy'");
    solve->add_flag("--exact", solve_exact_flag, "flow solver (default)");
    solve->add_flag("--oracle", solve_oracle, "brute-force enumeration instead");
    solve->callback([&] {
        Instance inst = load_instance_file(solve_instance);
        Translation t = parse_translation(solve_t);
        MatchResult r = solve_oracle
                            ? brute_force_oracle(inst.A, inst.B, inst.k, inst.p, t)
                            : solve_exact(inst.A, inst.B, inst.k, inst.p, t);
        std::printf("cost %.17g\n", r.cost);
        std::printf("pairs");
        for (const auto& [a, b] : r.matching.pairs) std::printf(" %d:%d", a, b);
        std::printf("\n");
    });

    // ---- optimize ----
    auto* opt = app.add_subcommand("optimize", "search the translation plane");
    std::string opt_instance, opt_algo = "exhaustive";
    double opt_eps = 0.5, opt_delta = -1.0;
    std::uint64_t opt_seed = 1;
    int opt_samples = 8;
    opt->add_option("--instance", opt_instance, "instance file")->required();
    opt->add_option("--algo", opt_algo, "exhaustive|grid|random|cluster")
        ->check(CLI::IsMember({"exhaustive", "grid", "random", "cluster"}));
    opt->add_option("--eps", opt_eps, "approximation parameter (0,1]");
    opt->add_option("--delta", opt_delta, "constant-factor solver slack");
    opt->add_option("--seed", opt_seed, "PRNG seed (random algo)");
    opt->add_option("--samples", opt_samples, "number of random draws");
    opt->callback([&] {
        Instance inst = load_instance_file(opt_instance);
        SearchResult r;
        if (opt_algo == "exhaustive") {
            r = const_factor_search(inst.A, inst.B, inst.k, inst.p,
                                    opt_delta < 0 ? 0.0 : opt_delta);
        } else if (opt_algo == "grid") {
            r = eps_optimum_search(inst.A, inst.B, inst.k, inst.p, opt_eps);
        } else if (opt_algo == "random") {
            r = random_sample_search(inst.A, inst.B, inst.k, inst.p, opt_eps,
                                     opt_samples, opt_seed);
        } else {
            r = disk_eating_search(inst.A, inst.B, inst.k, inst.p, opt_eps,
                                   opt_delta < 0 ? 1.0 : opt_delta);
        }
        std::cout << search_result_json(r).dump() << "\n";
    });

    // ---- diagram ----
    auto* diagram = app.add_subcommand("diagram", "approximate matching diagrams");
    diagram->require_subcommand(1);

    auto* dbuild = diagram->add_subcommand("build", "build and save a diagram");
    std::string db_instance, db_kind = "voronoi3", db_out;
    double db_eps = 0.5, db_delta = 0.0;
    dbuild->add_option("--instance", db_instance, "instance file")->required();
    dbuild->add_option("--kind", db_kind, "voronoi3|eps|cluster-eps")
        ->check(CLI::IsMember({"voronoi3", "eps", "cluster-eps"}));
    dbuild->add_option("--eps", db_eps, "approximation parameter (0,1]");
    dbuild->add_option("--delta", db_delta, "site matching slack (voronoi3)");
    dbuild->add_option("--out", db_out, "output file ('-' = stdout)");
    dbuild->callback([&] {
        Instance inst = load_instance_file(db_instance);
        MatchingDiagram d = [&] {
            if (db_kind == "voronoi3")
                return MatchingDiagram::build_voronoi3(inst.A, inst.B, inst.k, inst.p,
                                                       db_delta);
            if (db_kind == "eps")
                return MatchingDiagram::build_eps(inst.A, inst.B, inst.k, inst.p,
                                                  db_eps, DiagramKind::EpsT);
            return MatchingDiagram::build_eps(inst.A, inst.B, inst.k, inst.p, db_eps,
                                              DiagramKind::EpsCluster);
        }();
        write_output(db_out, d.to_json() + "\n");
        if (!db_out.empty() && db_out != "-") {
            std::printf("kind %s sites %d faceBound %lld\n",
                        diagram_kind_name(d.kind()), d.sites().size(),
                        static_cast<long long>(d.face_count_bound()));
        }
    });

    auto* dquery = diagram->add_subcommand("query", "query a saved diagram");
    std::string dq_diagram, dq_instance, dq_t = "0,0";
    dquery->add_option("--diagram", dq_diagram, "diagram file")->required();
    dquery->add_option("--instance", dq_instance, "instance file")->required();
    dquery->add_option("--t", dq_t, "translation 'dx,dy'");
    dquery->callback([&] {
        Instance inst = load_instance_file(dq_instance);
        MatchingDiagram d = MatchingDiagram::load(dq_diagram);
        Translation t = parse_translation(dq_t);
        QueryResult qr = d.query(t, inst.A, inst.B);
        nlohmann::json j;
        j["cost"] = qr.cost;
        j["face"] = {{"site", qr.face.site_index},
                     {"level", qr.face.level},
                     {"i", qr.face.ci},
                     {"j", qr.face.cj},
                     {"region", qr.face.region == FaceRegion::Outer ? "outer"
                                : qr.face.region == FaceRegion::CentralCell
                                    ? "central"
                                    : "annulus"}};
        j["matching"] = matching_json(qr.face.matching);
        j["translation"] = {t.dx, t.dy};
        std::cout << j.dump() << "\n";
    });

    auto* dverify = diagram->add_subcommand("verify", "sample approximation ratios");
    std::string dv_diagram, dv_instance;
    int dv_samples = 200;
    std::uint64_t dv_seed = 1;
    dverify->add_option("--diagram", dv_diagram, "diagram file")->required();
    dverify->add_option("--instance", dv_instance, "instance file")->required();
    dverify->add_option("--samples", dv_samples, "number of sample translations");
    dverify->add_option("--seed", dv_seed, "PRNG seed");
    dverify->callback([&] {
        Instance inst = load_instance_file(dv_instance);
        MatchingDiagram d = MatchingDiagram::load(dv_diagram);
        VerifyReport rep = d.verify(inst.A, inst.B, dv_samples, dv_seed);
        nlohmann::json j;
        j["guaranteeFactor"] = d.guarantee_factor();
        j["maxRatio"] = rep.max_ratio;
        j["samples"] = rep.samples;
        j["worstQuery"] = {rep.worst_query.dx, rep.worst_query.dy};
        std::cout << j.dump() << "\n";
    });

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "instance generators");
    gen->require_subcommand(1);

    auto* grand = gen->add_subcommand("random", "uniform points in a square");
    int gr_m = 5, gr_n = 6, gr_k = 3;
    std::string gr_p = "1", gr_out;
    double gr_box = 10.0;
    std::uint64_t gr_seed = 1;
    grand->add_option("--m", gr_m, "size of A");
    grand->add_option("--n", gr_n, "size of B");
    grand->add_option("--k", gr_k, "matching size");
    grand->add_option("--p", gr_p, "cost exponent (decimal or 'inf')");
    grand->add_option("--box", gr_box, "box side length");
    grand->add_option("--seed", gr_seed, "PRNG seed");
    grand->add_option("--out", gr_out, "output file ('-' = stdout)");
    grand->callback([&] {
        Instance inst = gen_random_instance(gr_m, gr_n, gr_k, CostExponent::parse(gr_p),
                                            gr_box, gr_seed);
        write_output(gr_out, write_instance(inst));
    });

    auto* ggrid = gen->add_subcommand("grid", "unit grids (worst-case family)");
    int gg_ms = 2, gg_ns = 4, gg_k = 4;
    std::string gg_p = "1", gg_out;
    ggrid->add_option("--m-side", gg_ms, "side of the A grid");
    ggrid->add_option("--n-side", gg_ns, "side of the B grid");
    ggrid->add_option("--k", gg_k, "matching size");
    ggrid->add_option("--p", gg_p, "cost exponent (decimal or 'inf')");
    ggrid->add_option("--out", gg_out, "output file ('-' = stdout)");
    ggrid->callback([&] {
        Instance inst = gen_grid_instance(gg_ms, gg_ns, gg_k, CostExponent::parse(gg_p));
        write_output(gg_out, write_instance(inst));
    });

    // ---- export-svg ----
    auto* svg = app.add_subcommand("export-svg", "render a saved diagram");
    std::string sv_diagram, sv_out;
    bool sv_nogrid = false;
    svg->add_option("--diagram", sv_diagram, "diagram file")->required();
    svg->add_option("--out", sv_out, "output file ('-' = stdout)");
    svg->add_flag("--no-grid", sv_nogrid, "omit grid lines");
    svg->callback([&] {
        MatchingDiagram d = MatchingDiagram::load(sv_diagram);
        SvgOptions options;
        options.draw_grid = !sv_nogrid;
        write_output(sv_out, export_svg(d, options));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const geomatch::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
