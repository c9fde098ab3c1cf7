#include "geomatch/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "geomatch/geometry.hpp"
#include "geomatch/instance.hpp"
#include "geomatch/parallel.hpp"
#include "geomatch/prng.hpp"

namespace geomatch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Largest power of two <= eps (eps in (0,1]).
double round_down_pow2(double eps, int* alpha_out) {
    if (!(eps > 0.0 && eps <= 1.0)) throw Error("eps must be in (0,1]");
    int e = 0;
    std::frexp(eps, &e);             // eps = man * 2^e, man in [0.5, 1)
    double pow2 = std::ldexp(1.0, e - 1);
    if (alpha_out != nullptr) *alpha_out = 1 - e;
    return pow2;
}

long long canonical_floor(double x, double side) {
    auto i = static_cast<long long>(std::floor(x / side));
    while (x < static_cast<double>(i) * side) --i;
    while (x >= static_cast<double>(i + 1) * side) ++i;
    return i;
}

double cluster_stretch(CostExponent p) {
    return p.is_inf() ? 1.0 : std::pow(2.0, 1.0 / p.value());
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t hash_from_hex(const std::string& s) {
    if (s.size() != 16) throw Error("bad instance hash string");
    return std::stoull(s, nullptr, 16);
}

}  // namespace

const char* diagram_kind_name(DiagramKind k) {
    switch (k) {
        case DiagramKind::Voronoi3: return "VORONOI3";
        case DiagramKind::EpsT: return "EPS_T";
        case DiagramKind::EpsCluster: return "EPS_CLUSTER";
    }
    return "?";
}

MatchingDiagram MatchingDiagram::build_voronoi3(std::span<const Point2> A,
                                                std::span<const Point2> B, int k,
                                                CostExponent p, double delta) {
    if (!(delta >= 0.0)) throw Error("delta must be nonnegative");
    MatchingDiagram d;
    d.kind_ = DiagramKind::Voronoi3;
    d.refined_ = false;
    d.eps_ = 0.0;
    d.delta_ = delta;
    d.guarantee_ = 3.0 * (1.0 + delta);
    d.k_ = k;
    d.p_ = p;
    d.hash_ = instance_hash(A, B, k, p);
    d.sites_ = build_point_to_point_set(A, B);
    d.base_.assign(d.sites_.translations.size(), kNaN);
    if (k < 1 || k > std::min(static_cast<int>(A.size()), static_cast<int>(B.size())))
        throw Error("infeasible size");
    return d;
}

MatchingDiagram MatchingDiagram::build_cluster_voronoi(std::span<const Point2> A,
                                                       std::span<const Point2> B,
                                                       int k, CostExponent p,
                                                       double delta) {
    if (!(delta >= 0.0)) throw Error("delta must be nonnegative");
    MatchingDiagram d;
    d.kind_ = DiagramKind::EpsCluster;
    d.refined_ = false;
    d.eps_ = 0.0;
    d.delta_ = delta;
    d.guarantee_ = (1.0 + 6.0 * cluster_stretch(p)) * (1.0 + delta);
    d.k_ = k;
    d.p_ = p;
    d.hash_ = instance_hash(A, B, k, p);
    d.sites_ = build_cluster_centers(build_point_to_point_set(A, B), k);
    d.base_.assign(d.sites_.translations.size(), kNaN);
    if (k < 1 || k > std::min(static_cast<int>(A.size()), static_cast<int>(B.size())))
        throw Error("infeasible size");
    return d;
}

MatchingDiagram MatchingDiagram::build_eps(std::span<const Point2> A,
                                           std::span<const Point2> B, int k,
                                           CostExponent p, double eps,
                                           DiagramKind site_kind) {
    if (site_kind == DiagramKind::Voronoi3)
        throw Error("build_eps needs EPS_T or EPS_CLUSTER");
    MatchingDiagram d;
    int alpha = 0;
    d.eps_ = round_down_pow2(eps, &alpha);
    d.kind_ = site_kind;
    d.refined_ = true;
    d.delta_ = d.eps_ / 2.0;
    d.guarantee_ = 1.0 + d.eps_;
    d.levels_ = alpha + 2;
    // cluster sites are sparser: same cell sizes, twice the covered extent
    d.cells_per_side_ = (site_kind == DiagramKind::EpsT ? 8 : 16) << alpha;
    d.k_ = k;
    d.p_ = p;
    d.hash_ = instance_hash(A, B, k, p);

    CandidateSet T = build_point_to_point_set(A, B);
    d.sites_ = site_kind == DiagramKind::EpsT ? std::move(T)
                                              : build_cluster_centers(T, k);

    const auto& ts = d.sites_.translations;
    const auto count = static_cast<std::int64_t>(ts.size());
    d.base_.assign(ts.size(), kNaN);
    std::vector<Matching> site_matchings(ts.size());
    parallel_chunks(count, 4, [&](int, std::int64_t lo, std::int64_t hi) {
        ExactMatcher matcher(A, B, k, p);
        for (std::int64_t i = lo; i < hi; ++i) {
            MatchResult r = matcher.solve_within(ts[i], d.delta_);
            d.base_[i] = r.cost;
            site_matchings[i] = std::move(r.matching);
        }
    });
    for (std::int64_t i = 0; i < count; ++i) {
        auto entry = std::make_unique<FaceEntry>();
        entry->ready = true;
        entry->matching = std::move(site_matchings[i]);
        d.faces_.emplace(FaceKey{static_cast<int>(i), -1, 0, 0}, std::move(entry));
    }
    return d;
}

double MatchingDiagram::level_side(int site, int level) const {
    // eps * 2^(level-3) * v0, computed as one rounded product and an exact
    // power-of-two scaling, so all level boundaries align exactly
    return std::ldexp(eps_ * base_[site], level - 3);
}

DiagramFace MatchingDiagram::locate(Translation t) const {
    DiagramFace f;
    f.site_index = nearest_site(t, sites_.coords).index;
    const Translation site = sites_.translations[f.site_index];
    if (refined_) {
        const double v0 = base_[f.site_index];
        if (v0 > 0.0) {
            const double dx = t.dx - site.dx;
            const double dy = t.dy - site.dy;
            const long long half = cells_per_side_ / 2;
            for (int level = 0; level <= levels_; ++level) {
                const double side = level_side(f.site_index, level);
                const long long i = canonical_floor(dx, side);
                const long long j = canonical_floor(dy, side);
                if (i >= -half && i < half && j >= -half && j < half) {
                    f.region = level == 0 ? FaceRegion::CentralCell
                                          : FaceRegion::AnnulusCell;
                    f.level = level;
                    f.ci = i;
                    f.cj = j;
                    f.center = face_center({f.site_index, level, i, j});
                    return f;
                }
            }
        }
    }
    f.region = FaceRegion::Outer;
    f.level = -1;
    f.center = site;
    return f;
}

Translation MatchingDiagram::face_center(const FaceKey& key) const {
    const Translation site = sites_.translations[key.site];
    if (key.level < 0) return site;
    const double side = level_side(key.site, key.level);
    return {site.dx + (static_cast<double>(key.i) + 0.5) * side,
            site.dy + (static_cast<double>(key.j) + 0.5) * side};
}

const Matching& MatchingDiagram::face_matching(const FaceKey& key, Translation center,
                                               std::span<const Point2> A,
                                               std::span<const Point2> B) const {
    FaceEntry* entry = nullptr;
    {
        std::lock_guard<std::mutex> lk(*table_mu_);
        auto& slot = faces_[key];
        if (!slot) slot = std::make_unique<FaceEntry>();
        entry = slot.get();
    }
    std::lock_guard<std::mutex> lk(entry->fill);
    if (!entry->ready) {
        MatchResult r = ExactMatcher(A, B, k_, p_).solve_within(center, delta_);
        entry->matching = std::move(r.matching);
        entry->ready = true;
        if (key.level < 0 && std::isnan(base_[key.site])) {
            std::lock_guard<std::mutex> lk2(*table_mu_);
            base_[key.site] = r.cost;
        }
    }
    return entry->matching;
}

QueryResult MatchingDiagram::query(Translation t, std::span<const Point2> A,
                                   std::span<const Point2> B) const {
    check_instance(A, B);
    QueryResult out;
    out.face = locate(t);
    FaceKey key{out.face.site_index, out.face.level, out.face.ci, out.face.cj};
    out.face.matching = face_matching(key, out.face.center, A, B);
    out.cost = cost_evaluate(A, B, out.face.matching, t, p_);
    return out;
}

void MatchingDiagram::check_instance(std::span<const Point2> A,
                                     std::span<const Point2> B) const {
    if (instance_hash(A, B, k_, p_) != hash_) throw Error("instance hash mismatch");
}

std::int64_t MatchingDiagram::face_count_bound() const {
    if (!refined_) return static_cast<std::int64_t>(sites_.translations.size());
    const std::int64_t nc = cells_per_side_;
    const std::int64_t full = nc * nc;
    const std::int64_t hole = (nc / 2) * (nc / 2);
    std::int64_t total = 0;
    for (double v0 : base_) {
        if (v0 == 0.0)
            total += 1;
        else
            total += full + levels_ * (full - hole) + 4;
    }
    return total;
}

std::vector<double> MatchingDiagram::base_values() const {
    std::lock_guard<std::mutex> lk(*table_mu_);
    return base_;
}

std::int64_t MatchingDiagram::memoized_face_count() const {
    std::lock_guard<std::mutex> lk(*table_mu_);
    std::int64_t c = 0;
    for (const auto& [key, entry] : faces_)
        if (entry->ready) ++c;
    return c;
}

VerifyReport MatchingDiagram::verify(std::span<const Point2> A,
                                     std::span<const Point2> B, int sample_count,
                                     std::uint64_t seed) const {
    check_instance(A, B);
    if (sample_count < 1) throw Error("need at least one sample");

    const auto& ts = sites_.translations;
    Box box{ts[0].dx, ts[0].dy, ts[0].dx, ts[0].dy};
    for (const auto& s : ts) {
        box.xmin = std::min(box.xmin, s.dx);
        box.xmax = std::max(box.xmax, s.dx);
        box.ymin = std::min(box.ymin, s.dy);
        box.ymax = std::max(box.ymax, s.dy);
    }
    // Refined diagrams have immutable eagerly-solved base values; lazy kinds
    // fill them on demand, so sampling must not read them there or repeat
    // runs would drift.
    double vref = 0.0;
    if (refined_)
        for (double v : base_) vref = std::max(vref, v);
    double scale = std::max(box.width(), box.height());
    if (scale == 0.0) scale = std::max(1.0, 8.0 * vref);
    const double pad = 0.25 * scale + 2.0 * vref + 1e-3;

    SplitMix64 rng(seed);
    std::vector<Translation> samples;
    samples.reserve(sample_count);
    for (int i = 0; i < sample_count; ++i) {
        const int mode = i % 4;
        const int site = static_cast<int>((i / 4) % ts.size());
        const double v0 = refined_ ? base_[site] : kNaN;
        if (mode <= 1) {
            samples.push_back({box.xmin - pad + rng.next_unit() * (box.width() + 2 * pad),
                               box.ymin - pad + rng.next_unit() * (box.height() + 2 * pad)});
        } else if (mode == 2 || !refined_ || v0 == 0.0) {
            const double rad =
                (!std::isnan(v0) && v0 > 0.0) ? 2.0 * v0 : std::max(0.1 * scale, 1e-3);
            const double r = rng.next_unit() * rad;
            const double ang = rng.next_unit() * 6.283185307179586;
            samples.push_back({ts[site].dx + r * std::cos(ang),
                               ts[site].dy + r * std::sin(ang)});
        } else {
            // straddle a level boundary of this site
            const int level = static_cast<int>(rng.next_below(levels_ + 1));
            const double side = level_side(site, level);
            const double half = static_cast<double>(cells_per_side_ / 2) * side;
            const double along = (2.0 * rng.next_unit() - 1.0) * half;
            const double across = half + (2.0 * rng.next_unit() - 1.0) * side;
            const bool vertical = rng.next_below(2) == 0;
            const bool positive = rng.next_below(2) == 0;
            const double off = positive ? across : -across;
            if (vertical)
                samples.push_back({ts[site].dx + off, ts[site].dy + along});
            else
                samples.push_back({ts[site].dx + along, ts[site].dy + off});
        }
    }

    struct ChunkStats {
        double max_ratio = -1.0;
        Translation worst;
        std::int64_t counted = 0;
    };
    const auto n = static_cast<std::int64_t>(samples.size());
    std::vector<ChunkStats> stats(std::max(plan_chunks(n, 8), 1));
    parallel_chunks(n, 8, [&](int chunk, std::int64_t lo, std::int64_t hi) {
        ExactMatcher matcher(A, B, k_, p_);
        ChunkStats st;
        for (std::int64_t i = lo; i < hi; ++i) {
            QueryResult qr = query(samples[i], A, B);
            const double opt = matcher.solve(samples[i]).cost;
            double ratio;
            if (opt < 1e-12) {
                if (qr.cost < 1e-9) continue;  // both zero for practical purposes
                ratio = qr.cost / 1e-12;
            } else {
                ratio = qr.cost / opt;
            }
            ++st.counted;
            if (ratio > st.max_ratio) {
                st.max_ratio = ratio;
                st.worst = samples[i];
            }
        }
        stats[chunk] = st;
    });

    VerifyReport rep;
    rep.max_ratio = 0.0;
    for (const auto& st : stats) {
        rep.samples += st.counted;
        if (st.counted > 0 && st.max_ratio > rep.max_ratio) {
            rep.max_ratio = st.max_ratio;
            rep.worst_query = st.worst;
        }
    }
    return rep;
}

std::string MatchingDiagram::to_json() const {
    nlohmann::json j;
    j["kind"] = diagram_kind_name(kind_);
    j["eps"] = eps_;
    j["delta"] = delta_;
    j["guaranteeFactor"] = guarantee_;
    j["k"] = k_;
    if (p_.is_inf())
        j["p"] = "inf";
    else
        j["p"] = p_.value();
    j["instanceHash"] = hash_hex(hash_);

    nlohmann::json sites = nlohmann::json::array();
    for (const auto& s : sites_.translations)
        sites.push_back({s.dx, s.dy});
    j["sites"] = std::move(sites);
    if (!sites_.radii.empty()) j["siteRadii"] = sites_.radii;

    {
        std::lock_guard<std::mutex> lk(*table_mu_);
        nlohmann::json bases = nlohmann::json::array();
        for (double v : base_) {
            if (std::isnan(v))
                bases.push_back(nullptr);
            else
                bases.push_back(v);
        }
        j["perSiteBaseValue"] = std::move(bases);

        nlohmann::json faces = nlohmann::json::array();
        for (const auto& [key, entry] : faces_) {
            if (!entry->ready) continue;
            nlohmann::json pairs = nlohmann::json::array();
            for (const auto& [a, b] : entry->matching.pairs)
                pairs.push_back({a, b});
            faces.push_back({{"site", key.site},
                             {"level", key.level},
                             {"i", key.i},
                             {"j", key.j},
                             {"matching", std::move(pairs)}});
        }
        j["memoizedFaces"] = std::move(faces);
    }
    return j.dump();
}

MatchingDiagram MatchingDiagram::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(std::string("invalid diagram JSON: ") + e.what());
    }
    MatchingDiagram d;
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "VORONOI3")
            d.kind_ = DiagramKind::Voronoi3;
        else if (kind == "EPS_T")
            d.kind_ = DiagramKind::EpsT;
        else if (kind == "EPS_CLUSTER")
            d.kind_ = DiagramKind::EpsCluster;
        else
            throw Error("unknown diagram kind '" + kind + "'");
        d.eps_ = j.at("eps").get<double>();
        d.delta_ = j.at("delta").get<double>();
        d.guarantee_ = j.at("guaranteeFactor").get<double>();
        d.k_ = j.at("k").get<int>();
        if (j.at("p").is_string())
            d.p_ = CostExponent::parse(j.at("p").get<std::string>());
        else
            d.p_ = CostExponent::finite(j.at("p").get<double>());
        d.hash_ = hash_from_hex(j.at("instanceHash").get<std::string>());

        d.refined_ = d.eps_ > 0.0;
        if (d.refined_) {
            int alpha = 0;
            if (round_down_pow2(d.eps_, &alpha) != d.eps_)
                throw Error("diagram eps must be a power of two");
            d.levels_ = alpha + 2;
            d.cells_per_side_ = (d.kind_ == DiagramKind::EpsT ? 8 : 16) << alpha;
        }

        for (const auto& s : j.at("sites"))
            d.sites_.translations.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
        d.sites_.kind = d.kind_ == DiagramKind::EpsT || d.kind_ == DiagramKind::Voronoi3
                            ? CandidateKind::PointToPoint
                            : CandidateKind::ClusterCenters;
        if (j.contains("siteRadii"))
            d.sites_.radii = j.at("siteRadii").get<std::vector<double>>();
        d.sites_.rebuild_coords();

        for (const auto& v : j.at("perSiteBaseValue")) {
            if (v.is_null())
                d.base_.push_back(kNaN);
            else
                d.base_.push_back(v.get<double>());
        }
        if (d.base_.size() != d.sites_.translations.size())
            throw Error("perSiteBaseValue size mismatch");
        if (d.refined_)
            for (double v : d.base_)
                if (std::isnan(v)) throw Error("refined diagram requires all base values");

        for (const auto& f : j.at("memoizedFaces")) {
            FaceKey key{f.at("site").get<int>(), f.at("level").get<int>(),
                        f.at("i").get<long long>(), f.at("j").get<long long>()};
            auto entry = std::make_unique<FaceEntry>();
            entry->ready = true;
            for (const auto& pr : f.at("matching"))
                entry->matching.pairs.emplace_back(pr.at(0).get<int>(),
                                                   pr.at(1).get<int>());
            d.faces_.emplace(key, std::move(entry));
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(std::string("invalid diagram JSON: ") + e.what());
    }
    return d;
}

void MatchingDiagram::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write diagram file '" + path + "'");
    out << to_json() << "\n";
}

MatchingDiagram MatchingDiagram::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open diagram file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

L2EnvelopeResult l2_envelope_query(std::span<const Translation> sites,
                                   std::span<const Matching> site_matchings,
                                   Translation s, std::span<const Point2> A,
                                   std::span<const Point2> B, int k, CostExponent p) {
    if (!p.is_two()) throw Error("envelope query requires p = 2");
    if (sites.empty()) throw Error("empty site list");
    if (sites.size() != site_matchings.size())
        throw Error("one matching per site required");

    int best = -1;
    double best_f = 0.0;
    for (std::size_t idx = 0; idx < sites.size(); ++idx) {
        const Matching& mt = site_matchings[idx];
        if (mt.size() != k) throw Error("site matching has wrong size");
        double gx = 0.0, gy = 0.0, q = 0.0;
        for (const auto& [ai, bi] : mt.pairs) {
            if (ai < 0 || ai >= static_cast<int>(A.size()) || bi < 0 ||
                bi >= static_cast<int>(B.size()))
                throw Error("index out of range");
            const double ex = A[ai].x - B[bi].x;
            const double ey = A[ai].y - B[bi].y;
            gx += ex;
            gy += ey;
            q += ex * ex + ey * ey;
        }
        const double f = 2.0 * (gx * s.dx + gy * s.dy) + q;
        if (best < 0 || f < best_f) {
            best = static_cast<int>(idx);
            best_f = f;
        }
    }
    return {best, site_matchings[best]};
}

std::vector<Translation> voronoi_cell_polygon(std::span<const Translation> sites,
                                              int index, const Box& clip_box) {
    if (sites.empty()) throw Error("empty site list");
    if (index < 0 || index >= static_cast<int>(sites.size()))
        throw Error("index out of range");
    for (const auto& s : sites)
        if (!clip_box.contains(s)) throw Error("clip box must bound all sites");

    std::vector<Translation> poly = {{clip_box.xmin, clip_box.ymin},
                                     {clip_box.xmax, clip_box.ymin},
                                     {clip_box.xmax, clip_box.ymax},
                                     {clip_box.xmin, clip_box.ymax}};
    const Translation si = sites[index];
    std::vector<Translation> next;
    for (std::size_t jdx = 0; jdx < sites.size(); ++jdx) {
        if (static_cast<int>(jdx) == index || poly.empty()) continue;
        const Translation sj = sites[jdx];
        // keep { x : <sj - si, x> <= (|sj|^2 - |si|^2) / 2 }
        const double nx = sj.dx - si.dx;
        const double ny = sj.dy - si.dy;
        if (nx == 0.0 && ny == 0.0) continue;
        const double off = 0.5 * (sj.dx * sj.dx + sj.dy * sj.dy - si.dx * si.dx -
                                  si.dy * si.dy);
        next.clear();
        for (std::size_t v = 0; v < poly.size(); ++v) {
            const Translation cur = poly[v];
            const Translation nxt = poly[(v + 1) % poly.size()];
            const double dc = nx * cur.dx + ny * cur.dy - off;
            const double dn = nx * nxt.dx + ny * nxt.dy - off;
            if (dc <= 0.0) next.push_back(cur);
            if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
                const double tpar = dc / (dc - dn);
                next.push_back({cur.dx + tpar * (nxt.dx - cur.dx),
                                cur.dy + tpar * (nxt.dy - cur.dy)});
            }
        }
        poly = next;
    }
    return poly;
}

}  // namespace geomatch
