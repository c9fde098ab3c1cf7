#include "geomatch/instance.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "geomatch/prng.hpp"

namespace geomatch {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Cursor {
    std::istringstream in;
    int line_no = 0;
    std::string name;

    explicit Cursor(const std::string& text) : in(text) {}

    /// Next line with comments stripped and content present; empty optional
    /// at EOF.
    bool next_tokens(std::vector<std::string>& toks) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.rfind("# name:", 0) == 0) {
                name = line.substr(7);
                while (!name.empty() && name.front() == ' ') name.erase(name.begin());
                continue;
            }
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            toks.clear();
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) toks.push_back(tok);
            if (!toks.empty()) return true;
        }
        return false;
    }
};

int parse_int(const std::string& tok, int line, const char* what) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(line, std::string("non-numeric ") + what + " '" + tok + "'");
    }
    if (used != tok.size())
        throw ParseError(line, std::string("non-numeric ") + what + " '" + tok + "'");
    if (v < 0 || v > 1000000) throw ParseError(line, std::string(what) + " out of range");
    return static_cast<int>(v);
}

double parse_coord(const std::string& tok, int line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(line, "non-numeric coordinate '" + tok + "'");
    }
    if (used != tok.size())
        throw ParseError(line, "non-numeric coordinate '" + tok + "'");
    if (!std::isfinite(v)) throw ParseError(line, "coordinate must be finite");
    return v;
}

Instance parse_json_instance(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(1, std::string("invalid JSON: ") + e.what());
    }
    Instance inst;
    try {
        inst.m = j.at("m").get<int>();
        inst.n = j.at("n").get<int>();
        inst.k = j.at("k").get<int>();
        if (j.at("p").is_string())
            inst.p = CostExponent::parse(j.at("p").get<std::string>());
        else
            inst.p = CostExponent::finite(j.at("p").get<double>());
        for (const auto& pt : j.at("A"))
            inst.A.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
        for (const auto& pt : j.at("B"))
            inst.B.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
        if (j.contains("name")) inst.name = j.at("name").get<std::string>();
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(1, std::string("invalid JSON instance: ") + e.what());
    }
    inst.validate();
    return inst;
}

}  // namespace

void Instance::validate() const {
    if (m < 1 || n < 1) throw Error("point sets must be nonempty");
    if (static_cast<int>(A.size()) != m || static_cast<int>(B.size()) != n)
        throw Error("header counts do not match point arrays");
    if (k < 1 || k > std::min(m, n)) throw Error("k out of range");
    for (const auto& pt : A)
        if (!std::isfinite(pt.x) || !std::isfinite(pt.y))
            throw Error("coordinate must be finite");
    for (const auto& pt : B)
        if (!std::isfinite(pt.x) || !std::isfinite(pt.y))
            throw Error("coordinate must be finite");
}

Instance parse_instance(const std::string& text) {
    for (char ch : text) {
        if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') continue;
        if (ch == '{') return parse_json_instance(text);
        break;
    }

    Cursor cur(text);
    std::vector<std::string> toks;
    if (!cur.next_tokens(toks)) throw ParseError(cur.line_no + 1, "missing header");
    if (toks.size() != 4)
        throw ParseError(cur.line_no, "header must be 'm n k p'");

    Instance inst;
    inst.m = parse_int(toks[0], cur.line_no, "m");
    inst.n = parse_int(toks[1], cur.line_no, "n");
    inst.k = parse_int(toks[2], cur.line_no, "k");
    try {
        inst.p = CostExponent::parse(toks[3]);
    } catch (const Error& e) {
        throw ParseError(cur.line_no, e.what());
    }
    if (inst.m < 1 || inst.n < 1) throw ParseError(cur.line_no, "m and n must be positive");
    if (inst.k < 1 || inst.k > std::min(inst.m, inst.n))
        throw ParseError(cur.line_no, "k out of range (need 1 <= k <= min(m,n))");

    auto read_points = [&](int count, std::vector<Point2>& out, const char* which) {
        for (int i = 0; i < count; ++i) {
            if (!cur.next_tokens(toks))
                throw ParseError(cur.line_no + 1,
                                 std::string("unexpected end of input reading ") + which +
                                     " point " + std::to_string(i + 1) + " of " +
                                     std::to_string(count));
            if (toks.size() != 2)
                throw ParseError(cur.line_no, "point line must be 'x y'");
            out.push_back({parse_coord(toks[0], cur.line_no),
                           parse_coord(toks[1], cur.line_no)});
        }
    };
    read_points(inst.m, inst.A, "A");
    read_points(inst.n, inst.B, "B");
    if (cur.next_tokens(toks)) throw ParseError(cur.line_no, "trailing content");
    inst.name = cur.name;
    inst.validate();
    return inst;
}

std::string write_instance(const Instance& inst) {
    std::string out;
    if (!inst.name.empty()) out += "# name: " + inst.name + "\n";
    out += std::to_string(inst.m) + " " + std::to_string(inst.n) + " " +
           std::to_string(inst.k) + " " + inst.p.str() + "\n";
    for (const auto& pt : inst.A)
        out += fmt_double(pt.x) + " " + fmt_double(pt.y) + "\n";
    for (const auto& pt : inst.B)
        out += fmt_double(pt.x) + " " + fmt_double(pt.y) + "\n";
    return out;
}

Instance load_instance_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open instance file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

void save_instance_file(const Instance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write instance file '" + path + "'");
    out << write_instance(inst);
}

Instance gen_random_instance(int m, int n, int k, CostExponent p, double box_side,
                             std::uint64_t seed) {
    if (m < 1 || n < 1 || k < 1 || k > std::min(m, n)) throw Error("invalid sizes");
    if (!(box_side > 0.0) || !std::isfinite(box_side))
        throw Error("box side must be positive");
    Instance inst;
    inst.m = m;
    inst.n = n;
    inst.k = k;
    inst.p = p;
    SplitMix64 rng(seed);
    inst.A.reserve(m);
    inst.B.reserve(n);
    for (int i = 0; i < m; ++i) {
        double x = rng.next_unit() * box_side;
        double y = rng.next_unit() * box_side;
        inst.A.push_back({x, y});
    }
    for (int j = 0; j < n; ++j) {
        double x = rng.next_unit() * box_side;
        double y = rng.next_unit() * box_side;
        inst.B.push_back({x, y});
    }
    return inst;
}

Instance gen_grid_instance(int m_side, int n_side, int k, CostExponent p) {
    if (m_side < 1 || n_side < 1 || m_side > n_side) throw Error("invalid grid sides");
    Instance inst;
    inst.m = m_side * m_side;
    inst.n = n_side * n_side;
    inst.k = k;
    inst.p = p;
    if (k < 1 || k > inst.m) throw Error("k out of range");
    for (int y = 0; y < m_side; ++y)
        for (int x = 0; x < m_side; ++x)
            inst.A.push_back({static_cast<double>(x), static_cast<double>(y)});
    for (int y = 0; y < n_side; ++y)
        for (int x = 0; x < n_side; ++x)
            inst.B.push_back({static_cast<double>(x), static_cast<double>(y)});
    return inst;
}

std::uint64_t instance_hash(std::span<const Point2> A, std::span<const Point2> B,
                            int k, CostExponent p) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    auto mix = [&h](std::uint64_t v) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (v >> (8 * byte)) & 0xFF;
            h *= 0x100000001B3ull;
        }
    };
    auto mix_double = [&](double d) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        mix(bits);
    };
    mix(static_cast<std::uint64_t>(A.size()));
    mix(static_cast<std::uint64_t>(B.size()));
    mix(static_cast<std::uint64_t>(k));
    if (p.is_inf()) {
        mix(1);
        mix_double(0.0);
    } else {
        mix(0);
        mix_double(p.value());
    }
    for (const auto& pt : A) {
        mix_double(pt.x);
        mix_double(pt.y);
    }
    for (const auto& pt : B) {
        mix_double(pt.x);
        mix_double(pt.y);
    }
    return h;
}

}  // namespace geomatch
