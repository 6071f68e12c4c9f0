// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [--only N] [--calibrate] [--csv path]

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "frozen.hpp"
#include "../support/oracles.hpp"
#include "wavesum/density.hpp"
#include "wavesum/geometry.hpp"
#include "wavesum/harness.hpp"
#include "wavesum/kernel.hpp"
#include "wavesum/scenario.hpp"
#include "wavesum/tangency.hpp"

using namespace wavesum;
namespace fs = std::filesystem;
using density::Configuration;
using harness::BoundReport;

namespace {

bool g_calibrate = false;
std::vector<BoundReport> g_reports;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void note(const std::string& s) {
    if (g_calibrate) std::printf("    %s\n", s.c_str());
}

const kernel::KernelProfile& default_profile(int d) {
    static std::map<int, kernel::KernelProfile> cache;
    auto it = cache.find(d);
    if (it == cache.end()) it = cache.emplace(d, kernel::make_bump(Space{d}, 40, 0.1, 1e-8)).first;
    return it->second;
}

const kernel::ResonantEvaluator& default_evaluator(int d) {
    static std::map<int, std::unique_ptr<kernel::ResonantEvaluator>> cache;
    auto& p = cache[d];
    if (!p) p = std::make_unique<kernel::ResonantEvaluator>(default_profile(d));
    return *p;
}

Configuration lattice(int d, std::vector<int> shape, double spacing, std::vector<double> radii,
                      std::string coeff = "unit", std::uint64_t seed = 1) {
    scenario::GeneratorSpec g;
    g.kind = "lattice";
    g.d = d;
    g.shape = std::move(shape);
    g.spacing = spacing;
    g.radii = std::move(radii);
    g.coeff = std::move(coeff);
    return scenario::generate_config(g, seed);
}

std::optional<Configuration> random_config(int d, std::size_t count, double extent, std::vector<double> radii,
                                           bool product, std::uint64_t seed, std::string coeff = "unit") {
    scenario::GeneratorSpec g;
    g.kind = "random-separated";
    g.d = d;
    g.count = count;
    g.extent = extent;
    g.radii = std::move(radii);
    g.product = product;
    g.coeff = std::move(coeff);
    try {
        return scenario::generate_config(g, seed);
    } catch (const FeasibilityError&) {
        return std::nullopt;
    }
}

Configuration adversarial(int d, std::size_t count, std::vector<double> radii, bool product, std::uint64_t seed,
                          std::string coeff = "unit") {
    scenario::GeneratorSpec g;
    g.kind = "adversarial-tangent";
    g.d = d;
    g.count = count;
    g.radii = std::move(radii);
    g.gap = 0.3;
    g.product = product;
    g.coeff = std::move(coeff);
    return scenario::generate_config(g, seed);
}

// Max ratio per u over nondegenerate rows, then the slope of log2(max) on log2(u).
struct Envelope {
    std::map<double, double> max_by_x;
    double max = 0;
    double slope = 0;
};
Envelope envelope(const std::vector<std::pair<double, double>>& xr) {
    Envelope e;
    for (auto [x, r] : xr) {
        if (!(r > 0)) continue;
        auto& m = e.max_by_x[x];
        m = std::max(m, r);
        e.max = std::max(e.max, r);
    }
    std::vector<double> xs, ys;
    for (auto [x, m] : e.max_by_x) {
        xs.push_back(x);
        ys.push_back(std::log2(m));
    }
    e.slope = oracle::slope(xs, ys);
    return e;
}
// Pooled slope of log2 ratio on x after removing each group's mean.
double within_slope(const std::vector<std::tuple<int, double, double>>& gxr) {
    std::map<int, std::vector<std::pair<double, double>>> by;
    for (auto [g, x, r] : gxr)
        if (r > 0) by[g].emplace_back(x, std::log2(r));
    double sxy = 0, sxx = 0;
    for (auto& [g, v] : by) {
        double mx = 0, my = 0;
        for (auto [x, y] : v) mx += x, my += y;
        mx /= double(v.size());
        my /= double(v.size());
        for (auto [x, y] : v) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
    }
    return sxx > 0 ? sxy / sxx : 0;
}
std::string describe(const Envelope& e) {
    std::string s;
    for (auto [x, m] : e.max_by_x) s += fmt(" %g:%.4g", x, m);
    return s;
}

// ------------------------------------------------------------------ 1
Outcome criterion1() {
    Outcome o;
    double worst = 0;
    for (double r : {1.0, 3.7}) {
        for (int i = 0; i < 500; ++i) {
            double rho = 40.0 * (i + 0.5) / 500 / r;
            double got = kernel::surface_fourier(Space{3}, r, rho);
            double want = r * r * oracle::b3(r * rho);
            worst = std::max(worst, std::abs(got - want) / std::abs(want));
        }
    }
    double l3 = std::abs(kernel::surface_transform(3, 1e-9) - 4 * M_PI) / (4 * M_PI);
    double l4 = std::abs(kernel::surface_transform(4, 1e-9) - 2 * M_PI * M_PI) / (2 * M_PI * M_PI);
    o.pass = worst <= 1e-10 && l3 <= 1e-8 && l4 <= 1e-8;
    o.detail = fmt("max rel err %.3g on 1000 points; B3(0+) rel %.2g, B4(0+) rel %.2g", worst, l3, l4);
    return o;
}

// ------------------------------------------------------------------ 2
Outcome criterion2() {
    Outcome o;
    const auto& prof = default_profile(3);
    const auto& ev = default_evaluator(3);
    const double hw = prof.shell_halfwidth();
    double herm = 0, zero = 0;
    std::map<int, double> Ck;
    std::size_t zeros = 0;
    for (int k : {3, 4, 5, 6}) {
        auto corpus = kernel::pair_corpus(k, 500, 2024, hw);
        for (const auto& s : corpus) {
            Vec4 y{}, y2{s.D, 0, 0, 0};
            double scale = std::sqrt(ev(s.r, s.r, 0) * ev(s.r2, s.r2, 0));
            if (kernel::supports_disjoint(s.r, s.r2, s.D, hw)) {
                kernel::QuadOptions q;
                q.force_quadrature = true;
                zero = std::max(zero, std::abs(kernel::scalar_product_distance(prof, s.r, s.r2, s.D, q)) / scale);
                ++zeros;
                continue;
            }
            // quadrature in one order against the resonant evaluator in the other
            cplx a = kernel::scalar_product(prof, Space{3}, y, s.r, y2, s.r2);
            double b = ev(y2, s.r2, y, s.r);
            herm = std::max(herm, std::abs(a - std::conj(cplx(b, 0))) / scale);
        }
        Ck[k] = kernel::fit_oscillatory_constant(ev, 5, corpus);
    }
    double cmax = 0;
    for (auto [k, c] : Ck) cmax = std::max(cmax, c);
    const double frozen_c = kernel::oscillatory_constant(3, 5);
    double growth = Ck[6] / Ck[3];
    o.pass = herm <= 1e-7 && zero < 1e-10 && cmax <= frozen_c && growth <= 2;
    o.detail = fmt("hermitian %.2g, certified zeros %zu max %.2g (norm-relative), C_k = %.4g/%.4g/%.4g/%.4g <= %g, "
                   "C6/C3 = %.3f",
                   herm, zeros, zero, Ck[3], Ck[4], Ck[5], Ck[6], frozen_c, growth);
    return o;
}

// ------------------------------------------------------------------ 3
std::vector<Vec5> lifted(const Configuration& cfg, const density::Ids& ids) {
    std::vector<Vec5> p;
    for (auto i : ids) p.push_back(density::lift(cfg.points[i]));
    return p;
}

bool partition_ok(const density::DensityDecomposition& dd) {
    std::set<std::size_t> seen;
    for (int nu = 0; nu <= dd.max_nu(); ++nu)
        for (auto i : dd.cls(nu))
            if (!seen.insert(i).second) return false;
    if (seen.size() != dd.slice.size()) return false;
    for (int nu = 0; nu < dd.max_nu(); ++nu) {
        auto a = dd.hat(nu), b = dd.hat(nu + 1);
        std::set<std::size_t> sa(a.begin(), a.end());
        for (auto i : b)
            if (!sa.count(i)) return false;
    }
    return true;
}

Outcome criterion3() {
    Outcome o;
    int mismatches = 0, canon_mismatch = 0, configs = 0, broken = 0;
    for (int c = 0; c < 100; ++c) {
        CounterRng g(333, c);
        std::size_t n = 5 + static_cast<std::size_t>(g.uniform() * 46);
        double extent = std::max(g.uniform(3, 12), 2.0 * std::cbrt(double(n)));
        auto cfg = random_config(3, n, extent, {8, 9, 10, 11, 12, 13, 14, 15}, false, 1000 + c);
        if (!cfg) continue;
        ++configs;
        auto slices = density::validate_and_slice(*cfg);
        for (const auto& [k, ids] : slices) {
            auto pts = lifted(*cfg, ids);
            auto ex = density::decompose_points(pts, k, density::WitnessMode::exact);
            auto ca = density::decompose_points(pts, k, density::WitnessMode::canonical);
            if (ex.nu != oracle::density_classes(pts, k, true)) ++mismatches;
            if (ca.nu != oracle::density_classes(pts, k, false)) ++canon_mismatch;
            broken += !partition_ok(ex) + !partition_ok(ca);
        }
    }
    // partition on the lattice corpora too
    for (int n : {2, 3, 4, 5})
        for (double sp : {1.0, 2.0}) {
            auto cfg = lattice(3, {n, n, n}, sp, {8, 9, 10});
            for (const auto& [k, ids] : density::validate_and_slice(cfg))
                broken += !partition_ok(density::decompose_density(cfg, ids, k));
        }
    std::vector<Vec5> line;
    for (int i = 0; i < 8; ++i) line.push_back({double(i), 0, 0, 0, 8});
    auto dl = density::decompose_points(line, 3, density::WitnessMode::exact);
    bool line_ok = std::all_of(dl.nu.begin(), dl.nu.end(), [](int v) { return v == 1; });
    auto grid = lattice(3, {5, 5, 5}, 1, {8});
    auto dg = density::decompose_density(grid, density::validate_and_slice(grid).at(3), 3);
    int grid_min = *std::min_element(dg.nu.begin(), dg.nu.end());
    o.pass = configs == 100 && mismatches == 0 && canon_mismatch == 0 && broken == 0 && line_ok && dg.max_nu() >= 4;
    o.detail = fmt("%d configs, exact mismatches %d, canonical mismatches %d, invariant failures %d; "
                   "8 collinear -> class %d; 5^3 grid -> classes %d..%d",
                   configs, mismatches, canon_mismatch, broken, 1 << dl.nu[0], 1 << grid_min, 1 << dg.max_nu());
    return o;
}

// ------------------------------------------------------------------ 4
Outcome criterion4() {
    Outcome o;
    geometry::TripleConfig small;
    small.j = 6;
    small.l = 4;
    for (auto& a : small.annuli) {
        a.t = 64;
        a.w = 4;
    }
    small.annuli[1].center = {16, 0, 0, 0};
    small.annuli[2].center = {8, 14, 0, 0};
    geometry::VolumeOptions mc;
    mc.method = geometry::VolumeMethod::mc;
    mc.samples = 2000000;
    mc.seed = 4;
    geometry::VolumeOptions gr;
    gr.method = geometry::VolumeMethod::grid;
    gr.seed = 4;
    auto a = geometry::triple_volume(small, mc);
    auto b = geometry::triple_volume(small, gr);
    double sigma = std::hypot(a.standard_error, b.standard_error);
    bool agree = std::abs(a.value - b.value) <= 3 * sigma;

    int coax = 0, coax_zero = 0;
    for (int j : {12, 22, 24, 26})
        for (const auto& ts : scenario::coaxial_triples(j, std::min((j + 1) / 2 + 10, j - 2), 5)) {
            ++coax;
            coax_zero += geometry::triple_volume(ts.cfg).certified_zero;
        }

    std::map<int, double> Cj;
    for (int j : {22, 24, 26}) {
        int l = (j + 1) / 2 + 10;
        auto gb = geometry::geom_bound(Space{3}, j, l);
        geometry::VolumeOptions vo;
        vo.samples = 200000;
        vo.seed = 9;
        double best = 0;
        for (const auto& ts : scenario::adversarial_triples(j, l, 25, 9)) {
            auto e = geometry::triple_volume(ts.cfg, vo);
            BoundReport r;
            r.lemma = "geom";
            r.d = 3;
            r.j = j;
            r.k = l;
            r.lhs = e.value;
            r.rhs = gb.bound;
            r.seed = 9;
            r.flags = e.flags;
            harness::finalize_ratio(r);
            g_reports.push_back(r);
            best = std::max(best, r.ratio);
            note(fmt("j=%d l=%d angle=%.6g value=%.6g se=%.3g ratio=%.6g", j, l, ts.angle, e.value, e.standard_error,
                     r.ratio));
        }
        Cj[j] = best;
    }
    double cmax = 0, cmin = 1e300;
    for (auto [j, c] : Cj) {
        cmax = std::max(cmax, c);
        cmin = std::min(cmin, c);
    }
    bool stable = cmin > 0 && cmax / cmin <= 2;
    bool bounded = cmax <= frozen::kSlack * frozen::kGeomC;
    o.pass = agree && coax == coax_zero && stable && bounded;
    o.detail = fmt("mc %.6g +- %.3g vs grid %.6g +- %.3g (%.2f sigma); coaxial %d/%d certified 0; "
                   "C_j = %.5g/%.5g/%.5g (spread %.3f, frozen C %.5g)",
                   a.value, a.standard_error, b.value, b.standard_error, std::abs(a.value - b.value) / sigma, coax_zero,
                   coax, Cj[22], Cj[24], Cj[26], cmax / cmin, frozen::kGeomC);
    return o;
}

// ------------------------------------------------------------------ 5
std::vector<Configuration> product_corpus_d3() {
    std::vector<Configuration> out;
    for (int n : {2, 3, 4, 6})
        for (double sp : {1.0, 2.0}) out.push_back(lattice(3, {n, n, n}, sp, {8, 9, 16, 17}));
    for (int n : {4, 8, 16}) out.push_back(lattice(3, {n, n, 1}, 1, {8, 9}));
    for (std::uint64_t seed : {1, 2, 3})
        for (auto [cnt, ext] : std::vector<std::pair<int, double>>{{20, 6}, {40, 10}, {60, 24}})
            if (auto c = random_config(3, cnt, ext, {8, 10, 12}, true, seed, "random-phase")) out.push_back(*c);
    for (std::uint64_t seed : {1, 2, 3})
        for (int cnt : {6, 12, 24}) out.push_back(adversarial(3, cnt, {8, 11, 16, 19}, true, seed, "random-phase"));
    return out;
}

Outcome criterion5() {
    Outcome o;
    int oracle_cases = 0, oracle_bad = 0;
    for (int c = 0; c < 12; ++c) {
        CounterRng g(55, c);
        std::size_t n = 20 + static_cast<std::size_t>(g.uniform() * 181);
        double extent = std::cbrt(double(n)) * g.uniform(1.5, 4);
        auto cfg = random_config(3, n, extent, {8}, false, 500 + c);
        if (!cfg) continue;
        std::vector<Vec4> amb, dense;
        for (std::size_t i = 0; i < cfg->points.size(); ++i) {
            amb.push_back(cfg->points[i].y);
            if (g.uniform() < 0.5) dense.push_back(cfg->points[i].y);
        }
        int m = c % 3;
        auto tp = tangency::k_profile(dense, amb, m);
        long tmax = static_cast<long>(tp.K[0].size()) + 3;
        auto K = oracle::k_table(dense, amb, tp.s_grid.back(), tmax);
        ++oracle_cases;
        for (std::size_t si = 0; si < tp.s_grid.size(); ++si)
            for (long t = 0; t <= tmax; ++t)
                if (tp.at(si, t) != K[tp.s_grid[si]][t]) {
                    ++oracle_bad;
                    si = tp.s_grid.size();
                    break;
                }
    }
    std::vector<std::pair<double, double>> rows;
    double worst = 0;
    std::size_t in_regime = 0, outside = 0;
    for (const auto& cfg : product_corpus_d3())
        for (const auto& [k, ids] : density::validate_and_slice(cfg)) {
            auto dd = density::decompose_density(cfg, ids, k);
            for (int nu = 0; nu <= dd.max_nu(); ++nu) {
                if (dd.cls(nu).empty()) continue;
                for (int m : {0, 2, 4, 6, 8, 10})
                    for (auto& r : scenario::kest_reports(cfg, dd, std::ldexp(1.0, nu), m)) {
                        g_reports.push_back(r);
                        if (r.flagged("outside-regime")) {
                            ++outside;
                            continue;
                        }
                        ++in_regime;
                        worst = std::max(worst, r.ratio);
                    }
            }
        }
    o.pass = oracle_cases >= 10 && oracle_bad == 0 && in_regime > 0 && worst <= frozen::kSlack * frozen::kKestC;
    o.detail = fmt("oracle %d/%d exact; guarded-regime cubes %zu (outside %zu), max K*/kest %.4g (frozen C %.4g)",
                   oracle_cases - oracle_bad, oracle_cases, in_regime, outside, worst, frozen::kKestC);
    return o;
}

// ------------------------------------------------------------------ 6
std::vector<Configuration> support_corpus_d3() {
    std::vector<Configuration> out;
    for (double sp : {1.0, 2.0, 3.0})
        for (int n : {2, 3, 4, 5})
            for (const auto& radii : std::vector<std::vector<double>>{{8}, {8, 9}, {8, 9, 10, 11}, {16, 17}})
                out.push_back(lattice(3, {n, n, n}, sp, radii));
    for (int n : {4, 8, 16}) out.push_back(lattice(3, {n, n, 1}, 1, {8}));
    for (int n : {8, 16}) out.push_back(lattice(3, {n, 1, 1}, 1, {8, 9}));
    for (std::uint64_t seed : {1, 2})
        for (int cnt : {10, 20, 40})
            for (double ext : {4.0, 8.0, 16.0}) {
                if (auto c = random_config(3, cnt, ext, {8, 12}, false, seed)) out.push_back(*c);
                if (auto c = random_config(3, cnt, ext, {8, 12}, true, seed)) out.push_back(*c);
            }
    return out;
}

std::vector<Configuration> tensor_corpus_d4() {
    std::vector<Configuration> out;
    for (int n : {2, 3})
        for (double sp : {1.0, 2.0})
            for (const auto& radii : std::vector<std::vector<double>>{{8}, {8, 9, 10}})
                out.push_back(lattice(4, {n, n, n, n}, sp, radii));
    out.push_back(lattice(4, {4, 4, 1, 1}, 1, {8, 9}));
    out.push_back(lattice(4, {8, 1, 1, 1}, 1, {8}));
    for (std::uint64_t seed : {1, 2})
        for (int cnt : {10, 30})
            if (auto c = random_config(4, cnt, 6, {8, 12}, true, seed)) out.push_back(*c);
    return out;
}

scenario::GammaSpec gamma_spec(int variant) {
    scenario::GammaSpec g;
    if (variant == 1) {
        g.y_period = 2;
    } else if (variant == 2) {
        g.y_period = 2;
        g.r_period = 2;
        g.r_base = 4;
    }
    return g;
}

Outcome criterion6() {
    Outcome o;
    harness::SupportOptions so;
    so.samples = 20000;
    so.seed = 6;
    std::vector<std::pair<double, double>> rows3, rows4;
    for (const auto& cfg : support_corpus_d3())
        for (const auto& [k, ids] : density::validate_and_slice(cfg)) {
            auto dd = density::decompose_density(cfg, ids, k);
            for (int nu = 0; nu <= 6; ++nu) {
                auto r = harness::verify_support(cfg, dd, std::ldexp(1.0, nu), so);
                if (r.flagged("degenerate")) continue;
                g_reports.push_back(r);
                rows3.emplace_back(nu, r.ratio);
            }
        }
    for (const auto& cfg : tensor_corpus_d4())
        for (int variant : {0, 1, 2}) {
            auto gs = gamma_spec(variant);
            auto slices = density::validate_and_slice(cfg);
            for (int j : {0, 1, 2})
                for (const auto& [k, ids] : slices)
                    for (int nu = 0; nu <= 6; ++nu) {
                        auto r = harness::verify_support_tensor(cfg, gs.gamma1(), gs.gamma2(), j, k, std::ldexp(1.0, nu), so);
                        if (r.flagged("degenerate")) continue;
                        g_reports.push_back(r);
                        rows4.emplace_back(nu, r.ratio);
                    }
        }
    auto e3 = envelope(rows3), e4 = envelope(rows4);
    note("d=3 max ratio by log2 u:" + describe(e3));
    note("d=4 max ratio by log2 u:" + describe(e4));
    bool cover = e3.max_by_x.size() == 7 && e4.max_by_x.size() >= 2;
    o.pass = cover && e3.max <= frozen::kSlack * frozen::kSupportC3 && e4.max <= frozen::kSlack * frozen::kSupportC4 &&
             e3.slope <= frozen::kMaxSlope && e4.slope <= frozen::kMaxSlope;
    o.detail = fmt("d=3: %zu rows, u-levels %zu, max %.4g (frozen %.4g), slope %.4f; d=4 tensor: %zu rows, u-levels "
                   "%zu, max %.4g (frozen %.4g), slope %.4f",
                   rows3.size(), e3.max_by_x.size(), e3.max, frozen::kSupportC3, e3.slope, rows4.size(),
                   e4.max_by_x.size(), e4.max, frozen::kSupportC4, e4.slope);
    return o;
}

// ------------------------------------------------------------------ 7
Outcome criterion7() {
    Outcome o;
    const auto& ev3 = default_evaluator(3);
    std::vector<std::pair<double, double>> by_u, by_diam, by_u4;
    std::vector<std::tuple<int, double, double>> diam_at_u;
    int slice_split_runs = 0, slice_split_bad = 0;
    auto run = [&](const Configuration& cfg, double diam) {
        auto slices = density::validate_and_slice(cfg);
        std::set<int> nus;
        for (const auto& [k, ids] : slices) {
            auto dd = density::decompose_density(cfg, ids, k);
            for (int nu = 0; nu <= std::min(dd.max_nu(), 6); ++nu)
                if (!dd.cls(nu).empty()) nus.insert(nu);
        }
        for (int nu : nus) {
            auto r = harness::verify_l2(cfg, ev3, std::ldexp(1.0, nu), 0.1);
            for (auto* b : {&r.main, &r.comparable, &r.cross, &r.slice_split, &r.slice_split_tight}) g_reports.push_back(*b);
            if (r.main.flagged("empty-class")) continue;
            ++slice_split_runs;
            slice_split_bad += r.slice_split.lhs > r.slice_split.rhs * (1 + 1e-9);
            by_u.emplace_back(nu, r.main.ratio);
            if (diam > 0) {
                by_diam.emplace_back(std::log2(diam), r.main.ratio);
                diam_at_u.emplace_back(nu, std::log2(diam), r.main.ratio);
            }
        }
    };
    for (int n : {2, 4, 8}) run(lattice(3, {n, n, n}, 1, {8, 9}, "random-phase", 3), n);
    for (int n : {2, 4, 8}) run(lattice(3, {n, n, n}, 2, {8, 9}, "random-phase", 3), 2 * n);
    for (int n : {4, 8, 16}) run(lattice(3, {n, n, 1}, 1, {8, 16}, "unit"), n);
    for (std::uint64_t seed : {1, 2})
        for (auto [cnt, ext] : std::vector<std::pair<int, double>>{{8, 4}, {24, 8}, {64, 16}})
            if (auto c = random_config(3, cnt, ext, {8, 12}, true, seed, "random-phase")) run(*c, ext);
    for (std::uint64_t seed : {1, 2, 3})
        for (int cnt : {6, 12, 24}) run(adversarial(3, cnt, {8, 11, 16, 19}, true, seed, "random-phase"), 0);

    const auto& ev4 = default_evaluator(4);
    for (const auto& cfg : tensor_corpus_d4())
        for (int variant : {0, 1, 2}) {
            auto gs = gamma_spec(variant);
            for (int j : {0, 1, 2})
                for (int nu = 0; nu <= 6; ++nu) {
                    auto r = harness::verify_l2_tensor(cfg, ev4, gs.gamma1(), gs.gamma2(), j, std::ldexp(1.0, nu), 0.1);
                    g_reports.push_back(r);
                    if (r.flagged("degenerate")) continue;
                    by_u4.emplace_back(nu, r.ratio);
                }
        }
    auto eu = envelope(by_u), ed = envelope(by_diam), e4 = envelope(by_u4);
    note("d=3 max ratio by log2 u:" + describe(eu));
    note("d=3 max ratio by log2 diameter:" + describe(ed));
    note("d=4 max ratio by log2 u:" + describe(e4));
    const double dslope = within_slope(diam_at_u);
    o.pass = slice_split_runs > 0 && slice_split_bad == 0 && eu.max <= frozen::kSlack * frozen::kL2C3 &&
             e4.max <= frozen::kSlack * frozen::kL2C4 && eu.slope <= frozen::kMaxSlope && dslope <= frozen::kMaxSlope &&
             e4.slope <= frozen::kMaxSlope;
    o.detail = fmt("d=3: max %.4g (frozen %.4g), slope in u %.4f, in diameter at fixed u %.4f (envelope %.4f); d=4: max %.4g (frozen %.4g), slope "
                   "%.4f; slice_split held on %d/%d runs",
                   eu.max, frozen::kL2C3, eu.slope, dslope, ed.slope, e4.max, frozen::kL2C4, e4.slope, slice_split_runs - slice_split_bad,
                   slice_split_runs);
    return o;
}

// ------------------------------------------------------------------ 8
Outcome criterion8() {
    Outcome o;
    auto coarse = kernel::make_bump(Space{3}, 2, 0.5, 1e-8);
    kernel::ResonantEvaluator ev(coarse);
    harness::GramOptions go;
    go.quadrature = true;
    go.quad.rel_tol = 1e-10;
    harness::GridSpec grid;
    grid.step = 0.05;
    double worst = 0, homog = 0;
    int done = 0;
    for (int c = 0; c < 20; ++c) {
        CounterRng g(88, c);
        std::size_t n = 1 + static_cast<std::size_t>(g.uniform() * 5);
        auto cfg = random_config(3, n, 3, {2, 3, 4}, false, 800 + c, "random-phase");
        if (!cfg) continue;
        density::Ids ids(cfg->points.size());
        std::iota(ids.begin(), ids.end(), 0);
        std::vector<cplx> coeffs;
        for (const auto& p : cfg->points) coeffs.push_back(p.c);
        auto gm = harness::gram(*cfg, ev, ids, go);
        double l2 = harness::l2_norm_sq(gm, coeffs);
        double direct = harness::direct_lp_norm(*cfg, ids, coeffs, 2.0, coarse, grid);
        double rel = std::abs(direct - l2) / l2;
        worst = std::max(worst, rel);
        note(fmt("config %d: n=%zu gram %.10g grid %.10g rel %.3g", c, n, l2, direct, rel));
        if (c < 3) {
            std::vector<cplx> twice;
            for (auto z : coeffs) twice.push_back(2.0 * z);
            for (double p : {1.5, 2.0}) {
                double a = harness::direct_lp_norm(*cfg, ids, coeffs, p, coarse, grid);
                double b = harness::direct_lp_norm(*cfg, ids, twice, p, coarse, grid);
                homog = std::max(homog, std::abs(b - std::pow(2.0, p) * a) / (std::pow(2.0, p) * a));
            }
        }
        ++done;
    }
    o.pass = done == 20 && worst <= 1e-3 && homog <= 1e-12;
    o.detail = fmt("%d tiny configurations, max |grid - gram| / gram = %.3g; homogeneity rel err %.2g", done, worst, homog);
    return o;
}

// ------------------------------------------------------------------ 9
Outcome criterion9() {
    Outcome o;
    int valid_pass = 0, flagged = 0;
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
        auto r = harness::dyadic_interp_check(scenario::interp_instance(99, i, false), frozen::kDyadC);
        g_reports.push_back(r);
        worst = std::max(worst, r.ratio);
        valid_pass += r.flags.empty() && r.lhs <= r.rhs;
    }
    for (int i = 50; i < 60; ++i) {
        auto r = harness::dyadic_interp_check(scenario::interp_instance(99, i, true), frozen::kDyadC);
        g_reports.push_back(r);
        flagged += r.flagged("hypothesis-violated");
    }
    o.pass = valid_pass == 50 && flagged == 10;
    o.detail = fmt("C = %g: %d/50 valid instances hold (max lhs/rhs %.4f), %d/10 violated instances flagged",
                   frozen::kDyadC, valid_pass, worst, flagged);
    return o;
}

// ------------------------------------------------------------------ 10
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome criterion10() {
    Outcome o;
    const fs::path dir = WAVESUM_SCENARIO_DIR;
    const fs::path tmp = fs::temp_directory_path() / "wavesum-acceptance";
    fs::remove_all(tmp);
    int files = 0, identical = 0, runs_ok = 0, scenarios = 0;
    std::vector<fs::path> paths;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
        ++scenarios;
        auto s = scenario::load_scenario(p.string());
        auto a = scenario::run_experiment(s, (tmp / "a" / s.name).string());
        auto b = scenario::run_experiment(s, (tmp / "b" / s.name).string());
        runs_ok += a.ok && b.ok;
        for (const char* f : {"reports.csv", "config.json", "summary.json"}) {
            ++files;
            identical += slurp(tmp / "a" / s.name / f) == slurp(tmp / "b" / s.name / f);
        }
    }
    // the interpolation rows, regenerated from the same seeds
    auto saved = std::move(g_reports);
    g_reports.clear();
    criterion9();
    std::string first = scenario::reports_csv(g_reports);
    g_reports.clear();
    criterion9();
    bool table_same = first == scenario::reports_csv(g_reports);
    g_reports = std::move(saved);
    fs::remove_all(tmp);
    o.pass = scenarios > 0 && runs_ok == scenarios && files == identical && table_same;
    o.detail = fmt("%d scenarios run twice, %d/%d output files byte-identical; regenerated interpolation rows %s", scenarios,
                   identical, files, table_same ? "identical" : "differ");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    std::string csv;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = std::atoi(argv[++i]);
        else if (!std::strcmp(argv[i], "--calibrate")) g_calibrate = true;
        else if (!std::strcmp(argv[i], "--csv") && i + 1 < argc) csv = argv[++i];
    }
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double budget;
    };
    std::vector<Criterion> all{
        {1, "closed-form kernel", criterion1, 10},
        {2, "scalar-product contract", criterion2, 300},
        {3, "density decomposition", criterion3, 60},
        {4, "geometry", criterion4, 600},
        {5, "tangency", criterion5, 300},
        {6, "support bound", criterion6, 300},
        {7, "L2 bounds", criterion7, 900},
        {8, "Plancherel cross-check", criterion8, 300},
        {9, "interpolation lemma", criterion9, 60},
        {10, "reproducibility", criterion10, 2700},
    };
    int failed = 0, known = 0, passed = 0;
    for (const auto& c : all) {
        if (only && c.id != only) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = sec <= c.budget;
        bool pass = o.pass && in_time;
        bool expected = std::find(frozen::kKnownFailures.begin(), frozen::kKnownFailures.end(), c.id) !=
                        frozen::kKnownFailures.end();
        passed += pass;
        if (!pass) (expected ? known : failed) += 1;
        std::printf("%s criterion %d (%s): %s [%.1fs / %.0fs budget]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), sec, c.budget);
        std::fflush(stdout);
    }
    std::printf("summary: %d passed, %d failed (%d known structural)\n", passed, failed + known, known);
    if (!csv.empty()) {
        std::ofstream out(csv, std::ios::binary);
        out << scenario::reports_csv(g_reports);
    }
    return failed ? 1 : 0;
}
