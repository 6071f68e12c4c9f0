#include "wavesum/tangency.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace wavesum::tangency {

std::size_t shell_count(const std::vector<Vec4>& points, const Vec4& y0, double t) {
    std::size_t n = 0;
    for (const auto& p : points) {
        double d = dist(p, y0);
        if (d > 0 && d >= t && d <= t + 3) ++n;
    }
    return n;
}

TangencyProfile k_profile(const std::vector<Vec4>& dense, const std::vector<Vec4>& ambient, int m) {
    if (m > 14) throw FeasibilityError("k_profile: t-grid too large for m > 14");
    TangencyProfile tp;
    tp.m = m;
    tp.t_max = 1L << (m + 10);
    tp.n_dense = dense.size();
    tp.n_ambient = ambient.size();
    for (int s = 0; std::ldexp(1.0, s) <= 2.0 * double(ambient.size()); ++s) tp.s_grid.push_back(s);
    if (tp.s_grid.empty()) tp.s_grid.push_back(0);
    const std::size_t ns = tp.s_grid.size();

    std::vector<std::vector<double>> dists(dense.size());
    double far = 0;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        for (const auto& p : ambient) {
            double d = dist(p, dense[i]);
            if (d > 0) dists[i].push_back(d);
        }
        std::sort(dists[i].begin(), dists[i].end());
        if (!dists[i].empty()) far = std::max(far, dists[i].back());
    }
    const long t_end = std::min<long>(tp.t_max, static_cast<long>(std::floor(far)));
    const std::size_t nt = static_cast<std::size_t>(std::max(0L, t_end) + 1);
    // hist[t][s]: dense points whose top qualifying s is exactly s
    std::vector<std::vector<std::size_t>> hist(nt, std::vector<std::size_t>(ns, 0));
    for (const auto& ds : dists) {
        for (std::size_t t = 0; t < nt; ++t) {
            double lo = double(t), hi = double(t) + 3;
            auto c = std::upper_bound(ds.begin(), ds.end(), hi) - std::lower_bound(ds.begin(), ds.end(), lo);
            if (c <= 0) continue;
            int top = static_cast<int>(std::floor(std::log2(double(c))));
            top = std::min<int>(top, static_cast<int>(ns) - 1);
            ++hist[t][top];
        }
    }
    tp.K.assign(ns, std::vector<std::size_t>(nt, 0));
    for (std::size_t t = 0; t < nt; ++t) {
        std::size_t acc = 0;
        for (std::size_t si = ns; si-- > 0;) {
            acc += hist[t][si];
            tp.K[si][t] = acc;
        }
    }
    tp.K_star.assign(ns, 0);
    for (std::size_t si = 0; si < ns; ++si)
        for (auto v : tp.K[si]) tp.K_star[si] = std::max(tp.K_star[si], v);
    return tp;
}

double kest_bound(const Space& space, double u, int m, double n_Y, int s) {
    check_space(space, 3, 4);
    const double first_scale = space.d == 3 ? std::exp2(double(m)) : std::exp2(4.0 * m / 3.0);
    double a = u * first_scale * std::pow(n_Y, 5.0 / 3.0) * std::exp2(-2.0 * s);
    double b = u * std::exp2(0.5 * m) * n_Y * std::exp2(-double(s));
    return std::max(a, b);
}

double InteractionSum::rhs(const std::string& name) const {
    for (const auto& [k, v] : rhs_variants)
        if (k == name) return v;
    throw InvalidArgument("InteractionSum: no variant " + name);
}

double InteractionSum::min_rhs() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& kv : rhs_variants) m = std::min(m, kv.second);
    return m;
}

double log_factor(int m, double u) { return (1.0 + m) * std::log2(2.0 + u); }

namespace {

struct CellKey {
    std::array<long long, 5> c;
    bool operator==(const CellKey& o) const { return c == o.c; }
};
struct CellHash {
    std::size_t operator()(const CellKey& k) const {
        std::uint64_t h = 0;
        for (auto v : k.c) h = mix64(h ^ static_cast<std::uint64_t>(v));
        return static_cast<std::size_t>(h);
    }
};

double checked(const GramEntry& entry, std::size_t a, std::size_t b) {
    double v = entry(a, b);
    if (std::isnan(v)) throw InvalidArgument("interaction sum: missing gram entry");
    return std::abs(v);
}

}  // namespace

InteractionSum comparable_sum(const density::Configuration& cfg, const density::Ids& ids, const GramEntry& entry,
                              int k, int m, double u, std::size_t n_total, std::size_t n_R) {
    InteractionSum out;
    out.constraint = "band [2^" + std::to_string(m) + ", 2^" + std::to_string(m + 1) + "]";
    const double cell = std::ldexp(1.0, m);
    const double lo = cell, hi = 2 * cell;
    std::vector<Vec5> pts;
    for (auto i : ids) pts.push_back(density::lift(cfg.points[i]));
    std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> grid;
    std::array<bool, 5> spread{};
    for (std::size_t a = 0; a < pts.size(); ++a) {
        CellKey key;
        for (int c = 0; c < 5; ++c) {
            key.c[c] = static_cast<long long>(std::floor(pts[a][c] / cell));
            spread[c] = spread[c] || pts[a][c] != pts[0][c];
        }
        grid[key].push_back(a);
    }
    for (std::size_t a = 0; a < pts.size(); ++a) {
        CellKey base;
        for (int c = 0; c < 5; ++c) base.c[c] = static_cast<long long>(std::floor(pts[a][c] / cell));
        std::array<int, 5> off{};
        for (int c = 0; c < 5; ++c) off[c] = spread[c] ? -2 : 0;
        while (true) {
            CellKey key = base;
            for (int c = 0; c < 5; ++c) key.c[c] += off[c];
            auto it = grid.find(key);
            if (it != grid.end())
                for (auto b : it->second) {
                    if (b <= a) continue;
                    double D = dist(pts[a], pts[b]);
                    if (D >= lo && D <= hi) {
                        out.lhs += checked(entry, ids[a], ids[b]);
                        ++out.pairs;
                    }
                }
            int c = 0;
            for (; c < 5; ++c) {
                if (!spread[c]) continue;
                if (++off[c] <= 2) break;
                off[c] = -2;
            }
            if (c == 5) break;
        }
    }
    const double nR = std::max<double>(1.0, double(n_R));
    const double scale = std::exp2(2.0 * (k - 0.5 * m)) * double(n_total);
    const double rand3 = nR * scale * log_factor(m, u) *
                         std::max(std::pow(u, 5.0 / 6.0) * std::exp2(5.0 * m / 6.0), u * std::exp2(0.5 * m));
    const double rand4 = scale * u * std::exp2(double(m)) / nR;
    out.rhs_variants = {{"rand3", rand3}, {"rand4", rand4}};
    return out;
}

InteractionSum cross_slice_sum(const density::Ids& ids_k, const density::Ids& ids_kp, const GramEntry& entry, int k, double u,
                               std::size_t n_total, std::size_t n_R_kp) {
    InteractionSum out;
    out.constraint = "cross-slice";
    for (auto a : ids_k)
        for (auto b : ids_kp) {
            out.lhs += checked(entry, a, b);
            ++out.pairs;
        }
    const double nR = std::max<double>(1.0, double(n_R_kp));
    const double i1 = std::exp2(2.0 * k) * double(n_total) * u / nR;
    const double i2 = nR * double(n_total) * std::exp2(double(k)) * log_factor(k, u) *
                      std::max(std::pow(u, 5.0 / 6.0) * std::exp2(5.0 * k / 6.0), u * std::exp2(0.5 * k));
    out.rhs_variants = {{"i1", i1}, {"i2", i2}};
    return out;
}

RandcorTerms randcor_terms(double u, int m, int k, double eps, int j, const std::map<int, std::size_t>& level_counts) {
    if (!(eps > 0)) throw InvalidArgument("randcor_terms: eps must be positive");
    double L = 0;
    for (const auto& [l, n] : level_counts)
        if (l >= j) L += std::exp2((l - j) / 10.0) * double(n);
    const double common = std::exp2(3.0 * k) * L * std::pow(u, eps) * std::exp2(m * eps);
    RandcorTerms r;
    r.II = common * std::pow(u, 11.0 / 12.0) * std::exp2(-0.5 * m);
    r.I = common * std::max(std::pow(u, 11.0 / 12.0) * std::exp2(-0.5 * m), std::pow(u, 13.0 / 12.0) * std::exp2(-double(m)));
    return r;
}

}  // namespace wavesum::tangency
