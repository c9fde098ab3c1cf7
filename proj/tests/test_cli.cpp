#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "geomatch/diagram.hpp"
#include "geomatch/instance.hpp"

using namespace geomatch;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(GEOMATCH_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.output.append(buf.data(), got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/geomatch_test_") + name;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

}  // namespace

TEST_CASE("solve prints the 3-4-5 cost") {
    const std::string inst = temp_path("345.txt");
    write_file(inst, "1 1 1 2\n0 0\n3 4\n");
    auto r = run_cli("solve --instance " + inst + " --t 0,0");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("cost 5") != std::string::npos);
    CHECK(r.output.find("pairs 0:0") != std::string::npos);

    auto oracle = run_cli("solve --instance " + inst + " --t 0,0 --oracle");
    CHECK(oracle.output == r.output);
}

TEST_CASE("optimize exhaustive finds exact copies at zero cost") {
    Instance inst = gen_random_instance(4, 6, 4, CostExponent::finite(1), 10.0, 77);
    for (int i = 0; i < 4; ++i) inst.B[i] = inst.A[i] + Translation{1.0, -2.0};
    const std::string path = temp_path("copy.txt");
    write_file(path, write_instance(inst));

    auto r = run_cli("optimize --instance " + path + " --algo exhaustive");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.output);
    CHECK(j["cost"].get<double>() == doctest::Approx(0.0));
    CHECK(j["algorithm"] == "exhaustive");
    CHECK(j["translation"][0].get<double>() == doctest::Approx(1.0));
    CHECK(j["translation"][1].get<double>() == doctest::Approx(-2.0));
}

TEST_CASE("diagram build, query, verify round trip") {
    const std::string inst_path = temp_path("d_inst.txt");
    const std::string diag_path = temp_path("d_diag.json");
    auto gen = run_cli("gen random --m 5 --n 6 --k 3 --p 1 --box 10 --seed 4 --out " +
                       inst_path);
    REQUIRE(gen.exit_code == 0);

    auto build = run_cli("diagram build --instance " + inst_path +
                         " --kind voronoi3 --delta 0 --out " + diag_path);
    REQUIRE(build.exit_code == 0);

    auto query = run_cli("diagram query --diagram " + diag_path + " --instance " +
                         inst_path + " --t 0.5,0.5");
    REQUIRE(query.exit_code == 0);
    auto qj = nlohmann::json::parse(query.output);
    CHECK(qj["cost"].get<double>() > 0.0);
    CHECK(qj["face"].contains("site"));

    auto verify = run_cli("diagram verify --diagram " + diag_path + " --instance " +
                          inst_path + " --samples 100 --seed 1");
    REQUIRE(verify.exit_code == 0);
    auto vj = nlohmann::json::parse(verify.output);
    CHECK(vj["maxRatio"].get<double>() <= 3.0 + 1e-6);

    // library query against the saved diagram must agree with the CLI
    Instance inst = load_instance_file(inst_path);
    auto d = MatchingDiagram::load(diag_path);
    auto lib = d.query({0.5, 0.5}, inst.A, inst.B);
    CHECK(lib.cost == doctest::Approx(qj["cost"].get<double>()).epsilon(1e-15));
}

TEST_CASE("fixed seeds give byte-identical CLI runs") {
    const std::string out1 = run_cli("gen random --m 6 --n 6 --k 2 --p 2 --seed 9 --out -").output;
    const std::string out2 = run_cli("gen random --m 6 --n 6 --k 2 --p 2 --seed 9 --out -").output;
    CHECK(out1 == out2);

    const std::string inst_path = temp_path("det.txt");
    write_file(inst_path, out1);
    const std::string cmd = "optimize --instance " + inst_path +
                            " --algo random --eps 1 --samples 3 --seed 11";
    CHECK(run_cli(cmd).output == run_cli(cmd).output);
}

TEST_CASE("usage and domain errors map to exit codes") {
    CHECK(run_cli("no-such-command").exit_code == 2);
    CHECK(run_cli("solve").exit_code == 2);  // missing required option
    const std::string bad = temp_path("bad.txt");
    write_file(bad, "1 1 9 2\n0 0\n3 4\n");
    CHECK(run_cli("solve --instance " + bad).exit_code == 1);
    CHECK(run_cli("solve --instance /nonexistent/file.txt").exit_code == 1);
}

TEST_CASE("export-svg produces markup") {
    const std::string inst_path = temp_path("svg_inst.txt");
    const std::string diag_path = temp_path("svg_diag.json");
    REQUIRE(run_cli("gen random --m 3 --n 4 --k 2 --p 2 --seed 6 --out " + inst_path)
                .exit_code == 0);
    REQUIRE(run_cli("diagram build --instance " + inst_path +
                    " --kind eps --eps 0.5 --out " + diag_path)
                .exit_code == 0);
    auto svg = run_cli("export-svg --diagram " + diag_path + " --out -");
    CHECK(svg.exit_code == 0);
    CHECK(svg.output.find("<?xml") == 0);
    CHECK(svg.output.find("<svg") != std::string::npos);
    CHECK(svg.output.rfind("</svg>") != std::string::npos);
}
