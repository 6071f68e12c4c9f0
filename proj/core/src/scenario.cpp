#include "wavesum/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wavesum/kernel.hpp"
#include "wavesum/tangency.hpp"

namespace wavesum::scenario {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using density::Configuration;
using density::Ids;
using density::WeightedPoint;
using harness::BoundReport;

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << text;
}

Vec4 random_direction(CounterRng& rng, int d) {
    Vec4 v{};
    double n = 0;
    while (n < 1e-12) {
        n = 0;
        for (int c = 0; c < d; ++c) {
            v[c] = rng.normal();
            n += v[c] * v[c];
        }
    }
    return scale(v, 1.0 / std::sqrt(n));
}

cplx coefficient(const std::string& rule, std::uint64_t seed, std::size_t i) {
    if (rule == "unit") return {1.0, 0.0};
    CounterRng rng(seed ^ 0xc0eff1c1e47ull, i);
    return std::polar(1.0, 2 * M_PI * rng.uniform());
}

bool separated(const std::vector<Vec4>& ys, const Vec4& y) {
    for (const auto& p : ys)
        if (dist(p, y) < 1.0) return false;
    return true;
}

Configuration product_of(int d, const std::vector<Vec4>& ys, std::vector<double> rs, const GeneratorSpec& spec,
                         std::uint64_t seed) {
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    Configuration cfg;
    cfg.space.d = d;
    cfg.is_product = true;
    for (const auto& y : ys)
        for (double r : rs) cfg.points.push_back({y, r, coefficient(spec.coeff, seed, cfg.points.size())});
    return cfg;
}

template <class T>
std::vector<T> get_list(const json& j, const char* key, std::vector<T> def) {
    return j.contains(key) ? j.at(key).get<std::vector<T>>() : def;
}

}  // namespace

density::Gamma1 GammaSpec::gamma1() const {
    const double base = y_base;
    const int period = std::max(1, y_period);
    return [base, period](const Vec4& y) {
        long long s = 0;
        for (double c : y) s += static_cast<long long>(std::floor(c));
        long long e = ((s % period) + period) % period;
        return std::pow(base, double(e));
    };
}

density::Gamma2 GammaSpec::gamma2() const {
    const double base = r_base;
    const int period = std::max(1, r_period);
    return [base, period](double r) {
        long long e = static_cast<long long>(std::floor(r)) % period;
        return std::pow(base, double(e));
    };
}

const std::vector<std::string>& known_lemmas() {
    static const std::vector<std::string> ids{"gram", "support", "support-tensor", "l2",   "l2-tensor",
                                              "kest", "geom",    "row-sup",        "dyad"};
    return ids;
}

// ---------------------------------------------------------------- scenario files

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("scenario: ") + e.what());
    }
    static const std::set<std::string> top{"schema", "name",    "generator", "u",     "k",       "j",
                                           "m",      "verify",  "seed",      "samples", "tol",   "eps",
                                           "threads", "profile", "gamma",    "geom",  "dyad",    "out"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!top.count(it.key())) throw InvalidArgument("scenario: unknown key " + it.key());
    Scenario s;
    s.schema = j.value("schema", 0);
    if (s.schema != kSchemaVersion)
        throw InvalidArgument("scenario: schema " + std::to_string(s.schema) + " is not supported");
    s.name = j.value("name", s.name);
    if (j.contains("generator")) {
        const auto& g = j.at("generator");
        auto& G = s.generator;
        G.kind = g.value("kind", G.kind);
        G.d = g.value("d", G.d);
        G.shape = get_list<int>(g, "shape", {});
        G.spacing = g.value("spacing", G.spacing);
        G.radii = get_list<double>(g, "radii", {});
        G.count = g.value("count", G.count);
        G.extent = g.value("extent", G.extent);
        G.gap = g.value("gap", G.gap);
        G.product = g.value("product", G.product);
        G.coeff = g.value("coeff", G.coeff);
        if (g.contains("ys"))
            for (const auto& y : g.at("ys")) {
                Vec4 v{};
                auto c = y.get<std::vector<double>>();
                if (c.size() != static_cast<std::size_t>(G.d)) throw InvalidArgument("scenario: ys entry has wrong length");
                std::copy(c.begin(), c.end(), v.begin());
                G.ys.push_back(v);
            }
    }
    s.u = get_list<double>(j, "u", s.u);
    s.k = get_list<int>(j, "k", s.k);
    s.j = get_list<int>(j, "j", s.j);
    s.m = get_list<int>(j, "m", s.m);
    s.verify = get_list<std::string>(j, "verify", {});
    for (const auto& v : s.verify)
        if (std::find(known_lemmas().begin(), known_lemmas().end(), v) == known_lemmas().end())
            throw InvalidArgument("scenario: unknown lemma id " + v);
    s.seed = j.value("seed", s.seed);
    s.samples = j.value("samples", s.samples);
    s.tol = j.value("tol", s.tol);
    s.eps = j.value("eps", s.eps);
    s.threads = j.value("threads", s.threads);
    if (j.contains("profile")) {
        s.profile_order = j["profile"].value("order", s.profile_order);
        s.support_radius = j["profile"].value("support_radius", s.support_radius);
    }
    if (j.contains("gamma")) {
        const auto& g = j.at("gamma");
        s.gamma.y_base = g.value("y_base", s.gamma.y_base);
        s.gamma.y_period = g.value("y_period", s.gamma.y_period);
        s.gamma.r_base = g.value("r_base", s.gamma.r_base);
        s.gamma.r_period = g.value("r_period", s.gamma.r_period);
    }
    if (j.contains("geom")) {
        const auto& g = j.at("geom");
        s.geom.j = get_list<int>(g, "j", {});
        s.geom.l_offset = g.value("l_offset", s.geom.l_offset);
        s.geom.angles = g.value("angles", s.geom.angles);
        s.geom.samples = g.value("samples", s.geom.samples);
    }
    if (j.contains("dyad")) {
        s.dyad_instances = j["dyad"].value("instances", s.dyad_instances);
        s.dyad_violated = j["dyad"].value("violated", s.dyad_violated);
    }
    s.out = j.value("out", s.out);
    for (double u : s.u)
        if (!(u >= 1) || !is_dyadic_power(static_cast<long long>(u)) || double(static_cast<long long>(u)) != u)
            throw InvalidArgument("scenario: u targets must be powers of two");
    return s;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["schema"] = s.schema;
    j["name"] = s.name;
    const auto& G = s.generator;
    json g;
    g["kind"] = G.kind;
    g["d"] = G.d;
    if (!G.shape.empty()) g["shape"] = G.shape;
    g["spacing"] = G.spacing;
    g["radii"] = G.radii;
    g["count"] = G.count;
    g["extent"] = G.extent;
    g["gap"] = G.gap;
    g["product"] = G.product;
    g["coeff"] = G.coeff;
    if (!G.ys.empty()) {
        json ys = json::array();
        for (const auto& y : G.ys) ys.push_back(std::vector<double>(y.begin(), y.begin() + G.d));
        g["ys"] = ys;
    }
    j["generator"] = g;
    j["u"] = s.u;
    j["k"] = s.k;
    j["j"] = s.j;
    j["m"] = s.m;
    j["verify"] = s.verify;
    j["seed"] = s.seed;
    j["samples"] = s.samples;
    j["tol"] = s.tol;
    j["eps"] = s.eps;
    j["threads"] = s.threads;
    j["profile"] = {{"order", s.profile_order}, {"support_radius", s.support_radius}};
    j["gamma"] = {{"y_base", s.gamma.y_base},
                  {"y_period", s.gamma.y_period},
                  {"r_base", s.gamma.r_base},
                  {"r_period", s.gamma.r_period}};
    j["geom"] = {{"j", s.geom.j}, {"l_offset", s.geom.l_offset}, {"angles", s.geom.angles}, {"samples", s.geom.samples}};
    j["dyad"] = {{"instances", s.dyad_instances}, {"violated", s.dyad_violated}};
    j["out"] = s.out;
    return j.dump(2);
}

// ---------------------------------------------------------------- generators

Configuration generate_config(const GeneratorSpec& spec, std::uint64_t seed) {
    const int d = spec.d;
    check_space(Space{d}, 2, 4);
    if (spec.radii.empty()) throw InvalidArgument("generator: radius set is empty");
    Configuration cfg;
    cfg.space.d = d;
    if (spec.kind == "lattice") {
        if (spec.shape.size() != static_cast<std::size_t>(d)) throw InvalidArgument("lattice: shape needs d entries");
        if (spec.spacing < 1) throw InvalidArgument("lattice: spacing below 1 breaks separation");
        std::vector<Vec4> ys;
        std::array<int, 4> idx{};
        while (true) {
            Vec4 y{};
            for (int c = 0; c < d; ++c) y[c] = idx[c] * spec.spacing;
            ys.push_back(y);
            int c = d - 1;
            for (; c >= 0; --c) {
                if (++idx[c] < spec.shape[c]) break;
                idx[c] = 0;
            }
            if (c < 0) break;
        }
        cfg = product_of(d, ys, spec.radii, spec, seed);
    } else if (spec.kind == "random-separated") {
        if (spec.count == 0 || !(spec.extent > 0)) throw InvalidArgument("random-separated: count and extent required");
        std::vector<Vec4> ys;
        std::vector<double> rs;
        const std::uint64_t budget = 1000ull * spec.count;
        for (std::uint64_t attempt = 0; attempt < budget && ys.size() < spec.count; ++attempt) {
            CounterRng rng(seed, attempt);
            Vec4 y{};
            for (int c = 0; c < d; ++c) y[c] = rng.uniform(0, spec.extent);
            if (!separated(ys, y)) continue;
            ys.push_back(y);
            rs.push_back(spec.radii[static_cast<std::size_t>(rng.uniform() * spec.radii.size()) % spec.radii.size()]);
        }
        if (ys.size() < spec.count)
            throw FeasibilityError("random-separated: could not place " + std::to_string(spec.count) +
                                   " separated centres in the box");
        if (spec.product) {
            cfg = product_of(d, ys, spec.radii, spec, seed);
        } else {
            for (std::size_t i = 0; i < ys.size(); ++i) cfg.points.push_back({ys[i], rs[i], coefficient(spec.coeff, seed, i)});
        }
    } else if (spec.kind == "adversarial-tangent") {
        if (spec.count == 0) throw InvalidArgument("adversarial-tangent: count required");
        std::vector<Vec4> ys{Vec4{}};
        std::vector<double> rs{spec.radii[0]};
        const std::uint64_t budget = 1000ull * spec.count;
        for (std::uint64_t attempt = 0; attempt < budget && ys.size() < spec.count; ++attempt) {
            CounterRng rng(seed, attempt);
            std::size_t parent = static_cast<std::size_t>(rng.uniform() * ys.size()) % ys.size();
            double r2 = spec.radii[static_cast<std::size_t>(rng.uniform() * spec.radii.size()) % spec.radii.size()];
            double r = rs[parent];
            bool internal = r2 != r && rng.uniform() < 0.5;
            if (r2 == r && spec.radii.size() > 1) internal = false;
            double D = (internal ? std::abs(r2 - r) : r + r2) + spec.gap;
            Vec4 y = add(ys[parent], scale(random_direction(rng, d), D));
            if (!separated(ys, y)) continue;
            ys.push_back(y);
            rs.push_back(r2);
        }
        if (ys.size() < spec.count) throw FeasibilityError("adversarial-tangent: placement budget exhausted");
        if (spec.product) {
            cfg = product_of(d, ys, rs, spec, seed);
        } else {
            for (std::size_t i = 0; i < ys.size(); ++i) cfg.points.push_back({ys[i], rs[i], coefficient(spec.coeff, seed, i)});
        }
    } else if (spec.kind == "product-from-projections") {
        if (spec.ys.empty()) throw InvalidArgument("product-from-projections: ys required");
        cfg = product_of(d, spec.ys, spec.radii, spec, seed);
    } else {
        throw InvalidArgument("generator: unknown kind " + spec.kind);
    }
    density::validate(cfg);
    return cfg;
}

std::string config_to_json(const Configuration& cfg) {
    json j;
    j["schema"] = kSchemaVersion;
    j["d"] = cfg.space.d;
    j["is_product"] = cfg.is_product;
    json pts = json::array();
    for (const auto& p : cfg.points) {
        json row = json::array();
        for (int c = 0; c < cfg.space.d; ++c) row.push_back(p.y[c]);
        row.push_back(p.r);
        row.push_back(p.c.real());
        row.push_back(p.c.imag());
        pts.push_back(row);
    }
    j["points"] = pts;
    return j.dump(1);
}

Configuration config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("configuration: ") + e.what());
    }
    if (j.value("schema", 0) != kSchemaVersion) throw InvalidArgument("configuration: unsupported schema");
    Configuration cfg;
    cfg.space.d = j.at("d").get<int>();
    check_space(cfg.space, 2, 4);
    cfg.is_product = j.value("is_product", false);
    const std::size_t width = static_cast<std::size_t>(cfg.space.d) + 3;
    for (const auto& row : j.at("points")) {
        auto v = row.get<std::vector<double>>();
        if (v.size() != width) throw InvalidArgument("configuration: point row has wrong length");
        WeightedPoint p;
        for (int c = 0; c < cfg.space.d; ++c) p.y[c] = v[c];
        p.r = v[cfg.space.d];
        p.c = {v[cfg.space.d + 1], v[cfg.space.d + 2]};
        cfg.points.push_back(p);
    }
    return cfg;
}

void save_config(const Configuration& cfg, const std::string& path) { write_file(path, config_to_json(cfg)); }
Configuration load_config(const std::string& path) { return config_from_json(read_file(path)); }

double resonance_gap(const WeightedPoint& a, const WeightedPoint& b) {
    const double D = dist(a.y, b.y);
    return std::min({std::abs(a.r - b.r - D), std::abs(a.r - b.r + D), std::abs(a.r + b.r - D), a.r + b.r + D});
}

std::vector<TripleSample> adversarial_triples(int j, int l, int angles, std::uint64_t seed) {
    if (l > j) throw InvalidArgument("adversarial_triples: l > j");
    if (angles < 2) throw InvalidArgument("adversarial_triples: need at least two angles");
    const double t = std::ldexp(1.0, j), w = 4.0, rho = t + 0.5 * w;
    std::vector<TripleSample> out;
    for (int i = 0; i < angles; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(j) * 1000 + i);
        const double D12 = std::ldexp(1.0 + 0.25 * rng.uniform(), l);
        const double D13 = std::ldexp(2.25 + 0.25 * rng.uniform(), l);
        // latitude circles cut from the middle sphere of A1 by A2 and A3
        const double th12 = std::acos(D12 / (2 * rho)), th13 = std::acos(D13 / (2 * rho));
        const double touch = th12 - th13;
        const double band = 2 * w / D12;
        double alpha;
        if (i == 0) {
            alpha = std::ldexp(1.0, l - j - 3);  // transition angle
        } else {
            double s = -2.0 + 4.0 * (i - 1) / std::max(1, angles - 2);
            alpha = touch + s * band;
        }
        TripleSample ts;
        ts.angle = alpha;
        ts.cfg.space.d = 3;
        ts.cfg.j = j;
        ts.cfg.l = l;
        for (auto& a : ts.cfg.annuli) {
            a.t = t;
            a.w = w;
        }
        ts.cfg.annuli[1].center = {D12, 0, 0, 0};
        ts.cfg.annuli[2].center = {D13 * std::cos(alpha), D13 * std::sin(alpha), 0, 0};
        out.push_back(ts);
    }
    return out;
}

std::vector<TripleSample> coaxial_triples(int j, int l, int count) {
    const double t = std::ldexp(1.0, j);
    std::vector<TripleSample> out;
    for (int i = 0; i < count; ++i) {
        TripleSample ts;
        ts.cfg.space.d = 3;
        ts.cfg.j = j;
        ts.cfg.l = l;
        for (auto& a : ts.cfg.annuli) {
            a.t = t;
            a.w = 4;
        }
        ts.cfg.annuli[1].center = {std::ldexp(1.0, l), 0, 0, 0};
        ts.cfg.annuli[2].center = {std::ldexp(2.25 + 0.05 * i, l), 0, 0, 0};
        out.push_back(ts);
    }
    return out;
}

harness::InterpolationCheckInput interp_instance(std::uint64_t seed, int index, bool violated) {
    CounterRng rng(seed ^ 0x64796164ull, static_cast<std::uint64_t>(index));
    harness::InterpolationCheckInput in;
    in.p0 = 1;
    in.p1 = 2;
    in.p = 1.5;
    in.M = std::exp2(rng.uniform(-1, 1));
    const int atoms = 4 + static_cast<int>(rng.uniform() * 12);
    for (int a = 0; a < atoms; ++a) in.weights.push_back(rng.uniform(0.1, 2.0));
    std::vector<int> pool{-3, -2, -1, 0, 1, 2, 3};
    const int nscales = 1 + static_cast<int>(rng.uniform() * 5);
    for (int i = 0; i < nscales; ++i) {
        std::size_t pick = static_cast<std::size_t>(rng.uniform() * pool.size()) % pool.size();
        in.scales.push_back(pool[pick]);
        pool.erase(pool.begin() + pick);
    }
    std::sort(in.scales.begin(), in.scales.end());
    for (int sc : in.scales) {
        std::vector<double> f(atoms, 0.0);
        bool any = false;
        for (int a = 0; a < atoms; ++a)
            if (rng.uniform() < 0.6) {
                double sign = rng.uniform() < 0.8 ? 1.0 : -1.0;
                f[a] = sign * std::exp2(sc) * in.M * rng.uniform(0.2, 1.0);
                any = true;
            }
        if (!any) f[0] = std::exp2(sc) * in.M * 0.5;
        double s = 0;
        for (double pv : {in.p0, in.p1}) {
            double norm = 0;
            for (int a = 0; a < atoms; ++a) norm += std::pow(std::abs(f[a]), pv) * in.weights[a];
            s = std::max(s, norm / (std::exp2(sc * pv) * std::pow(in.M, pv)));
        }
        in.F.push_back(f);
        in.s.push_back(s);
    }
    if (violated) {
        std::size_t which = static_cast<std::size_t>(rng.uniform() * in.s.size()) % in.s.size();
        in.s[which] *= 0.5;
    }
    return in;
}

std::vector<BoundReport> kest_reports(const Configuration& cfg, const density::DensityDecomposition& dd, double u,
                                      int m) {
    std::vector<BoundReport> out;
    Ids cls = harness::density_class(dd, u);
    if (cls.empty()) return out;
    density::CubeCover cc = density::cube_cover(cfg, cls, m, dd.slice);
    for (const auto& q : cc.cubes) {
        std::set<Vec4> dense_set, amb_set;
        for (auto i : cls)
            if (density::in_box(density::lift(cfg.points[i]), q.star_lo, q.star_hi)) dense_set.insert(cfg.points[i].y);
        for (auto i : q.star_members) amb_set.insert(cfg.points[i].y);
        std::vector<Vec4> dense(dense_set.begin(), dense_set.end()), ambient(amb_set.begin(), amb_set.end());
        tangency::TangencyProfile tp = tangency::k_profile(dense, ambient, m);
        BoundReport r;
        r.lemma = "kest3";
        r.d = cfg.space.d;
        r.k = dd.k;
        r.u = u;
        r.m = m;
        bool in_regime = false;
        double best = -1;
        for (std::size_t si = 0; si < tp.s_grid.size(); ++si) {
            int s = tp.s_grid[si];
            if (!tangency::kest3_regime(s, m, u)) continue;
            double bound = tangency::kest_bound(cfg.space, u, m, double(q.counts.n_Y), s);
            double ratio = bound > 0 ? double(tp.K_star[si]) / bound : 0.0;
            if (!in_regime || ratio > best) {
                best = ratio;
                r.lhs = double(tp.K_star[si]);
                r.rhs = bound;
            }
            in_regime = true;
        }
        if (!in_regime) {
            r.flags.push_back("outside-regime");
            for (std::size_t si = 0; si < tp.s_grid.size(); ++si) {
                double bound = tangency::kest_bound(cfg.space, u, m, double(q.counts.n_Y), tp.s_grid[si]);
                double ratio = bound > 0 ? double(tp.K_star[si]) / bound : 0.0;
                if (ratio > best) {
                    best = ratio;
                    r.lhs = double(tp.K_star[si]);
                    r.rhs = bound;
                }
            }
        }
        harness::finalize_ratio(r);
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------- reports

std::string reports_csv(const std::vector<BoundReport>& rs) {
    std::string s = harness::csv_header() + "\n";
    for (const auto& r : rs) s += harness::csv_row(r) + "\n";
    return s;
}

std::vector<BoundReport> parse_reports_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != harness::csv_header()) throw InvalidArgument("reports: unexpected CSV header");
    std::vector<BoundReport> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (line.back() == ',') f.push_back("");
        if (f.size() != 12) throw InvalidArgument("reports: row has " + std::to_string(f.size()) + " fields");
        BoundReport r;
        r.lemma = f[0];
        r.d = std::stoi(f[1]);
        if (!f[2].empty()) r.k = std::stoi(f[2]);
        if (!f[3].empty()) r.u = std::stod(f[3]);
        if (!f[4].empty()) r.m = std::stoi(f[4]);
        if (!f[5].empty()) r.j = std::stoi(f[5]);
        if (!f[6].empty()) r.eps = std::stod(f[6]);
        r.lhs = std::stod(f[7]);
        r.rhs = std::stod(f[8]);
        r.ratio = std::stod(f[9]);
        std::istringstream fs_(f[10]);
        std::string flag;
        while (std::getline(fs_, flag, ';'))
            if (!flag.empty()) r.flags.push_back(flag);
        r.seed = std::stoull(f[11]);
        out.push_back(r);
    }
    return out;
}

namespace {

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

bool wants(const Scenario& s, const std::string& id) {
    return std::find(s.verify.begin(), s.verify.end(), id) != s.verify.end();
}

std::map<int, Ids> selected_slices(const Scenario& s, const Configuration& cfg) {
    auto slices = density::validate_and_slice(cfg);
    if (s.k.empty()) return slices;
    std::map<int, Ids> out;
    for (int k : s.k) {
        auto it = slices.find(k);
        if (it != slices.end()) out.insert(*it);
    }
    return out;
}

}  // namespace

RunResult run_experiment(const Scenario& s, const std::string& dir) {
    RunResult res;
    res.dir = dir;
    fs::create_directories(dir);
    const std::string started = utc_now();
    json manifest;
    manifest["schema"] = kSchemaVersion;
    manifest["tool_version"] = kToolVersion;
    manifest["name"] = s.name;
    manifest["seed"] = s.seed;
    manifest["samples"] = s.samples;
    manifest["tol"] = s.tol;
    manifest["eps"] = s.eps;
    manifest["threads"] = s.threads;
    manifest["scenario"] = json::parse(scenario_to_json(s));

    Configuration cfg;
    std::map<int, Ids> slices;
    std::map<int, density::DensityDecomposition> dds;
    std::optional<kernel::KernelProfile> prof;
    std::unique_ptr<kernel::ResonantEvaluator> ev;
    auto profile = [&]() -> const kernel::ResonantEvaluator& {
        if (!ev) {
            prof = kernel::make_bump(cfg.space, s.profile_order, s.support_radius, s.tol);
            ev = std::make_unique<kernel::ResonantEvaluator>(*prof);
            manifest["profile"] = {{"d", prof->d},
                                   {"order", prof->order},
                                   {"support_radius", prof->support_radius},
                                   {"tol", prof->tol},
                                   {"rho_lo", prof->rho_lo},
                                   {"rho_max", prof->rho_max}};
        }
        return *ev;
    };
    const harness::SupportOptions sopt{s.samples, s.seed, 2.0 * s.support_radius};

    auto stage = [&](const std::string& name, const std::function<void()>& body) {
        if (!res.ok) {
            res.stages.push_back({name, "skipped", 0, ""});
            return;
        }
        auto t0 = std::chrono::steady_clock::now();
        StageRecord rec{name, "ok", 0, ""};
        try {
            body();
        } catch (const std::exception& e) {
            rec.status = "failed";
            rec.error = e.what();
            res.ok = false;
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.stages.push_back(rec);
    };
    auto tag = [&](BoundReport r) {
        r.corpus = s.name;
        if (r.seed == 0) r.seed = s.seed;
        res.reports.push_back(std::move(r));
    };

    if (!s.verify.empty()) {
        stage("generate", [&] {
            cfg = generate_config(s.generator, s.seed);
            save_config(cfg, (fs::path(dir) / "config.json").string());
        });
        stage("decompose", [&] {
            slices = selected_slices(s, cfg);
            for (const auto& [k, ids] : slices) dds.emplace(k, density::decompose_density(cfg, ids, k));
            json classes;
            for (const auto& [k, dd] : dds) {
                json row;
                for (int nu = 0; nu <= dd.max_nu(); ++nu) row.push_back(dd.cls(nu).size());
                classes[std::to_string(k)] = row;
            }
            manifest["classes"] = classes;
        });
        if (wants(s, "gram"))
            stage("gram", [&] {
                Ids all;
                for (const auto& [k, ids] : slices) all.insert(all.end(), ids.begin(), ids.end());
                if (all.size() > 4000) throw FeasibilityError("gram: more than 4000 points");
                harness::GramOptions go;
                go.threads = s.threads;
                harness::GramMatrix g = harness::gram(cfg, profile(), all, go);
                std::vector<cplx> c;
                for (auto i : all) c.push_back(cfg.points[i].c);
                bool clamped = false;
                double n2 = harness::l2_norm_sq(g, c, &clamped);
                manifest["gram"] = {{"size", g.size()}, {"evaluated_pairs", g.evaluated_pairs()}, {"l2_norm_sq", n2},
                                    {"clamped", clamped}};
            });
        if (wants(s, "support"))
            stage("support", [&] {
                for (const auto& [k, dd] : dds)
                    for (double u : s.u) tag(harness::verify_support(cfg, dd, u, sopt));
            });
        if (wants(s, "support-tensor"))
            stage("support-tensor", [&] {
                auto g1 = s.gamma.gamma1();
                auto g2 = s.gamma.gamma2();
                for (int j : s.j)
                    for (const auto& [k, ids] : slices)
                        for (double u : s.u) tag(harness::verify_support_tensor(cfg, g1, g2, j, k, u, sopt));
            });
        if (wants(s, "l2"))
            stage("l2", [&] {
                for (double u : s.u) {
                    auto r = harness::verify_l2(cfg, profile(), u, s.eps);
                    for (auto* b : {&r.main, &r.comparable, &r.cross, &r.slice_split, &r.slice_split_tight}) tag(*b);
                }
            });
        if (wants(s, "l2-tensor"))
            stage("l2-tensor", [&] {
                auto g1 = s.gamma.gamma1();
                auto g2 = s.gamma.gamma2();
                for (int j : s.j)
                    for (double u : s.u) tag(harness::verify_l2_tensor(cfg, profile(), g1, g2, j, u, s.eps));
            });
        if (wants(s, "kest"))
            stage("kest", [&] {
                for (const auto& [k, dd] : dds)
                    for (double u : s.u)
                        for (int m : s.m)
                            for (auto& r : kest_reports(cfg, dd, u, m)) tag(r);
            });
        if (wants(s, "geom"))
            stage("geom", [&] {
                for (int j : s.geom.j) {
                    int l = (j + 1) / 2 + s.geom.l_offset;
                    geometry::GeomBound gb = geometry::geom_bound(Space{3}, j, l);
                    geometry::VolumeOptions vo;
                    vo.samples = s.geom.samples;
                    vo.seed = s.seed;
                    for (const auto& ts : adversarial_triples(j, l, s.geom.angles, s.seed)) {
                        auto est = geometry::triple_volume(ts.cfg, vo);
                        BoundReport r;
                        r.lemma = "geom";
                        r.d = 3;
                        r.j = j;
                        r.k = l;
                        r.lhs = est.value;
                        r.rhs = gb.bound;
                        r.flags = est.flags;
                        if (est.certified_zero) r.flags.push_back("certified-zero");
                        if (!gb.applicable) r.flags.push_back("not-applicable");
                        r.seed = s.seed;
                        harness::finalize_ratio(r);
                        tag(r);
                    }
                }
            });
        if (wants(s, "row-sup"))
            stage("row-sup", [&] {
                if (!ev) {
                    prof = kernel::make_bump(cfg.space, s.profile_order, s.support_radius, s.tol);
                }
                for (int e = 1; e <= 6; ++e) {
                    double r = std::ldexp(1.0, e);
                    auto rs = harness::row_transform_sup(cfg.space, r, *prof);
                    BoundReport b;
                    b.lemma = "row-sup";
                    b.d = cfg.space.d;
                    b.k = e;
                    b.lhs = rs.sup;
                    b.rhs = std::pow(r, 0.5 * (cfg.space.d - 1));
                    harness::finalize_ratio(b);
                    tag(b);
                }
            });
        if (wants(s, "dyad"))
            stage("dyad", [&] {
                for (int i = 0; i < s.dyad_instances + s.dyad_violated; ++i) {
                    auto in = interp_instance(s.seed, i, i >= s.dyad_instances);
                    auto r = harness::dyadic_interp_check(in, 4.0);
                    r.seed = s.seed;
                    tag(r);
                }
            });
        write_file((fs::path(dir) / "reports.csv").string(), reports_csv(res.reports));
        write_file((fs::path(dir) / "summary.json").string(), harness::reports_json(res.reports, s.name));
    }

    json stages = json::array();
    std::string failed;
    for (const auto& st : res.stages) {
        stages.push_back({{"name", st.name}, {"status", st.status}, {"seconds", st.seconds}, {"error", st.error}});
        if (st.status == "failed" && failed.empty()) failed = st.name;
    }
    manifest["stages"] = stages;
    manifest["ok"] = res.ok;
    manifest["failed_stage"] = failed;
    manifest["rows"] = res.reports.size();
    manifest["started_at"] = started;
    manifest["finished_at"] = utc_now();
    write_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2));
    return res;
}

std::string emit_report(const std::string& dir, const std::string& format) {
    const fs::path d(dir);
    if (!fs::exists(d / "manifest.json")) throw InvalidArgument("report: no manifest in " + dir);
    json manifest = json::parse(read_file((d / "manifest.json").string()));
    if (!manifest.value("ok", false) || !fs::exists(d / "reports.csv"))
        throw InvalidArgument("report: incomplete run directory " + dir);
    const std::string csv = read_file((d / "reports.csv").string());
    auto rows = parse_reports_csv(csv);
    if (format == "csv") return (d / "reports.csv").string();
    if (format == "json") {
        std::string path = (d / "summary.json").string();
        write_file(path, harness::reports_json(rows, manifest.value("name", std::string())));
        return path;
    }
    if (format == "plotdata") {
        std::ostringstream os;
        os << "x\ty\tseries\n";
        char buf[64];
        for (const auto& r : rows) {
            double x;
            std::string series = r.lemma;
            if (r.lemma == "geom" && r.j && r.k) {
                x = *r.j;
                series += ":j-l=" + std::to_string(*r.j - *r.k);
            } else if (r.u) {
                x = std::log2(*r.u);
                if (r.k) series += ":k=" + std::to_string(*r.k);
                if (r.j) series += ":j=" + std::to_string(*r.j);
                if (r.m) series += ":m=" + std::to_string(*r.m);
            } else {
                x = r.k ? *r.k : 0;
            }
            std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t", x, r.ratio);
            os << buf << series << "\n";
        }
        std::string path = (d / "plotdata.tsv").string();
        write_file(path, os.str());
        return path;
    }
    throw InvalidArgument("report: unknown format " + format);
}

}  // namespace wavesum::scenario
