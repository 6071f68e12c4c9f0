#include "wavesum/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "json.hpp"

namespace wavesum::harness {

// ---------------------------------------------------------------- gram

double GramMatrix::by_id(std::size_t ia, std::size_t ib) const {
    auto a = position.find(ia), b = position.find(ib);
    if (a == position.end() || b == position.end()) return std::nan("");
    return (*this)(a->second, b->second);
}

std::size_t GramMatrix::evaluated_pairs() const {
    std::size_t n = 0;
    for (std::size_t a = 0; a < size(); ++a)
        for (std::size_t b = a; b < size(); ++b) n += mask[a * size() + b];
    return n;
}

GramMatrix gram(const Configuration& cfg, const kernel::ResonantEvaluator& ev, const Ids& ids,
                const GramOptions& opt) {
    if (ids.empty()) throw InvalidArgument("gram: empty selector");
    const kernel::KernelProfile& prof = ev.profile();
    if (prof.d != cfg.space.d) throw InvalidArgument("gram: profile dimension differs from configuration");
    GramMatrix g;
    g.ids = ids;
    const std::size_t n = ids.size();
    for (std::size_t a = 0; a < n; ++a) g.position[ids[a]] = a;
    g.entries.assign(n * n, 0.0);
    g.mask.assign(n * n, 0);
    const double hw = prof.shell_halfwidth();
    auto row = [&](std::size_t a) {
        const auto& P = cfg.points[ids[a]];
        for (std::size_t b = a; b < n; ++b) {
            const auto& Q = cfg.points[ids[b]];
            double D = dist(P.y, Q.y);
            if (kernel::supports_disjoint(P.r, Q.r, D, hw)) continue;
            double v = opt.quadrature ? kernel::scalar_product_distance(prof, P.r, Q.r, D, opt.quad) : ev(P.r, Q.r, D);
            g.entries[a * n + b] = g.entries[b * n + a] = v;
            g.mask[a * n + b] = g.mask[b * n + a] = 1;
        }
    };
    const int threads = std::max(1, opt.threads);
    if (threads == 1) {
        for (std::size_t a = 0; a < n; ++a) row(a);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t a = t; a < n; a += threads) row(a);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return g;
}

double l2_norm_sq(const GramMatrix& g, const std::vector<cplx>& coeffs, bool* clamped, double tol) {
    if (coeffs.size() != g.size()) throw InvalidArgument("l2_norm_sq: coefficient count does not match gram");
    const std::size_t n = g.size();
    double sum = 0, scale = 0;
    for (std::size_t a = 0; a < n; ++a) {
        scale += std::norm(coeffs[a]) * g(a, a);
        for (std::size_t b = 0; b < n; ++b)
            if (g.mask[a * n + b]) sum += (coeffs[a] * std::conj(coeffs[b])).real() * g(a, b);
    }
    if (clamped) *clamped = false;
    if (sum < 0) {
        if (sum < -10 * tol * scale) throw QuadratureError("l2_norm_sq: gram matrix is not positive semidefinite");
        if (clamped) *clamped = true;
        return 0.0;
    }
    return sum;
}

cplx cross_inner(const GramMatrix& g, const std::vector<std::size_t>& A, const std::vector<std::size_t>& B,
                 const std::vector<cplx>& coeffs) {
    cplx s(0, 0);
    for (auto a : A)
        for (auto b : B) s += coeffs[a] * std::conj(coeffs[b]) * g(a, b);
    return s;
}

// ---------------------------------------------------------------- support

double shell_volume(int d, double r, double hw) {
    return ball_volume(d) * (std::pow(r + hw, d) - std::pow(std::max(0.0, r - hw), d));
}

SupportEstimate support_measure(const Configuration& cfg, const Ids& ids, double hw, long samples,
                                std::uint64_t seed) {
    const int d = cfg.space.d;
    check_space(cfg.space, 2, 4);
    SupportEstimate est;
    est.samples = samples;
    est.seed = seed;
    if (ids.empty()) return est;
    std::vector<double> cum;
    double V = 0;
    for (auto i : ids) {
        V += shell_volume(d, cfg.points[i].r, hw);
        cum.push_back(V);
    }
    est.sum_of_volumes = V;
    double s1 = 0, s2 = 0;
    for (long n = 0; n < samples; ++n) {
        CounterRng rng(seed, static_cast<std::uint64_t>(n));
        std::size_t pick = std::upper_bound(cum.begin(), cum.end(), rng.uniform() * V) - cum.begin();
        pick = std::min(pick, ids.size() - 1);
        const auto& P = cfg.points[ids[pick]];
        const double lo = std::pow(std::max(0.0, P.r - hw), d), hi = std::pow(P.r + hw, d);
        double rad = std::pow(lo + rng.uniform() * (hi - lo), 1.0 / d);
        Vec4 dir{};
        double nn = 0;
        while (nn < 1e-24) {
            nn = 0;
            for (int c = 0; c < d; ++c) {
                dir[c] = rng.normal();
                nn += dir[c] * dir[c];
            }
        }
        Vec4 x = add(P.y, scale(dir, rad / std::sqrt(nn)));
        int cover = 0;
        for (auto i : ids) cover += std::abs(dist(x, cfg.points[i].y) - cfg.points[i].r) <= hw;
        double v = V / std::max(1, cover);
        s1 += v;
        s2 += v * v;
    }
    est.value = s1 / double(samples);
    est.standard_error = std::sqrt(std::max(0.0, s2 / double(samples) - est.value * est.value) / double(samples));
    return est;
}

// ---------------------------------------------------------------- reports

bool BoundReport::flagged(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }

void finalize_ratio(BoundReport& r) { r.ratio = r.rhs > 0 ? r.lhs / r.rhs : 0.0; }

std::string csv_header() { return "lemma,d,k,u,m,j,eps,lhs,rhs,ratio,flags,seed"; }

namespace {
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
template <class T>
std::string opt_str(const std::optional<T>& v) {
    if (!v) return "";
    if constexpr (std::is_integral_v<T>) return std::to_string(*v);
    else return num(*v);
}
std::string join_flags(const std::vector<std::string>& f) {
    std::string s;
    for (std::size_t i = 0; i < f.size(); ++i) s += (i ? ";" : "") + f[i];
    return s;
}
}  // namespace

std::string csv_row(const BoundReport& r) {
    std::ostringstream os;
    os << r.lemma << ',' << r.d << ',' << opt_str(r.k) << ',' << opt_str(r.u) << ',' << opt_str(r.m) << ','
       << opt_str(r.j) << ',' << opt_str(r.eps) << ',' << num(r.lhs) << ',' << num(r.rhs) << ',' << num(r.ratio) << ','
       << join_flags(r.flags) << ',' << r.seed;
    return os.str();
}

std::string reports_json(const std::vector<BoundReport>& rs, const std::string& run) {
    nlohmann::ordered_json j;
    j["run"] = run;
    j["rows"] = rs.size();
    nlohmann::ordered_json by;
    for (const auto& r : rs) {
        auto& e = by[r.lemma];
        if (e.is_null()) {
            e["count"] = 0;
            e["max_ratio"] = 0.0;
            e["flagged"] = 0;
        }
        e["count"] = e["count"].get<int>() + 1;
        e["max_ratio"] = std::max(e["max_ratio"].get<double>(), r.ratio);
        if (!r.flags.empty()) e["flagged"] = e["flagged"].get<int>() + 1;
    }
    j["by_lemma"] = by;
    return j.dump(2);
}

Ids density_class(const density::DensityDecomposition& dd, double u) {
    if (!(u >= 1) || !is_dyadic_power(static_cast<long long>(u)) || double(static_cast<long long>(u)) != u)
        throw InvalidArgument("density class: u must be a power of two");
    return dd.cls(static_cast<int>(std::log2(u) + 0.5));
}

BoundReport verify_support(const Configuration& cfg, const density::DensityDecomposition& dd, double u,
                           const SupportOptions& opt) {
    BoundReport r;
    r.lemma = "support";
    r.d = cfg.space.d;
    r.k = dd.k;
    r.u = u;
    r.seed = opt.seed;
    Ids cls = density_class(dd, u);
    if (cls.empty()) {
        r.flags.push_back("degenerate");
        return r;
    }
    r.lhs = support_measure(cfg, cls, opt.halfwidth, opt.samples, opt.seed).value;
    r.rhs = std::exp2(double((cfg.space.d - 1) * dd.k)) * double(dd.slice.size()) / u;
    finalize_ratio(r);
    return r;
}

TensorSelection tensor_selection(const Configuration& cfg, const density::Gamma1& g1, const density::Gamma2& g2,
                                 int j, int k, double u, density::WitnessMode mode) {
    TensorSelection sel;
    sel.j = j;
    sel.k = k;
    sel.u = u;
    density::TensorLevelStructure t = density::tensor_levels(cfg, g1, g2, j, k);
    sel.flags = t.flags;
    sel.level_count = t.level.size();
    if (!t.ys.empty() && !t.rs.empty()) {
        int lmin = 1 << 30, lmax = -(1 << 30);
        for (std::size_t a = 0; a < t.ys.size(); ++a)
            for (std::size_t b = 0; b < t.rs.size(); ++b) {
                double g = std::abs(t.gamma(a, b));
                if (g == 0) continue;
                int l = static_cast<int>(std::floor(std::log2(g)));
                lmin = std::min(lmin, l);
                lmax = std::max(lmax, l);
            }
        for (int l = lmin; l <= lmax; ++l) {
            std::size_t c = density::level_count(t, l);
            if (c) sel.level_counts[l] = c;
        }
    }
    sel.config = t.as_configuration(t.widened, cfg.space.d);
    if (t.widened.empty()) return sel;
    std::vector<Vec5> pts;
    for (const auto& p : sel.config.points) pts.push_back(density::lift(p));
    density::DensityDecomposition dd = density::decompose_points(pts, k, mode);
    const int nu = static_cast<int>(std::log2(u) + 0.5);
    const double lo = std::ldexp(1.0, j), hi = std::ldexp(1.0, j + 1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double g = std::abs(sel.config.points[i].c.real());
        if (dd.nu[i] == nu && g >= lo && g < hi) sel.ids.push_back(i);
    }
    return sel;
}

BoundReport verify_support_tensor(const Configuration& cfg, const density::Gamma1& g1, const density::Gamma2& g2,
                                  int j, int k, double u, const SupportOptions& opt) {
    if (cfg.space.d != 4) throw UnsupportedDimension("verify_support_tensor: d = 4 only");
    TensorSelection sel = tensor_selection(cfg, g1, g2, j, k, u);
    BoundReport r;
    r.lemma = "support-tensor";
    r.d = 4;
    r.k = k;
    r.j = j;
    r.u = u;
    r.seed = opt.seed;
    r.flags = sel.flags;
    if (sel.ids.empty()) {
        r.flags.push_back("degenerate");
        return r;
    }
    std::size_t near = 0;
    for (const auto& [l, c] : sel.level_counts)
        if (std::abs(l - j) <= 10) near += c;
    r.lhs = support_measure(sel.config, sel.ids, opt.halfwidth, opt.samples, opt.seed).value;
    r.rhs = std::exp2(3.0 * k) * double(near) / u;
    finalize_ratio(r);
    return r;
}

double split_threshold(double u, double eps) { return 100.0 / eps * std::log2(2.0 + u); }

L2Result verify_l2(const Configuration& cfg, const kernel::ResonantEvaluator& ev, double u, double eps, double a_exp,
                   density::WitnessMode mode) {
    if (!cfg.is_product) throw InvalidArgument("verify_l2: configuration must be a product");
    if (cfg.space.d != 3) throw UnsupportedDimension("verify_l2: d = 3 only");
    for (const auto& p : cfg.points)
        if (std::abs(p.c) > 1 + 1e-12) throw InvalidArgument("verify_l2: coefficients must satisfy |c| <= 1");
    auto slices = density::validate_and_slice(cfg);
    std::map<int, Ids> cls;
    double rhs_sum = 0;
    for (const auto& [k, ids] : slices) {
        auto dd = density::decompose_density(cfg, ids, k, mode);
        Ids c = density_class(dd, u);
        if (!c.empty()) cls[k] = c;
        rhs_sum += std::exp2(2.0 * k) * double(ids.size());
    }
    L2Result res;
    auto base = [&](const char* name) {
        BoundReport r;
        r.lemma = name;
        r.d = 3;
        r.u = u;
        r.eps = eps;
        r.a_exp = a_exp;
        return r;
    };
    res.main = base("l2");
    res.comparable = base("l2-comparable");
    res.cross = base("l2-cross");
    res.slice_split = base("slice-split");
    res.slice_split_tight = base("slice-split-tight");
    res.main.rhs = std::pow(u, a_exp + eps) * rhs_sum;
    if (cls.empty()) {
        for (auto* r : {&res.main, &res.comparable, &res.cross, &res.slice_split, &res.slice_split_tight})
            r->flags.push_back("empty-class");
        return res;
    }
    Ids all;
    std::map<int, std::vector<std::size_t>> rows;
    for (const auto& [k, ids] : cls)
        for (auto i : ids) {
            rows[k].push_back(all.size());
            all.push_back(i);
        }
    GramMatrix g = gram(cfg, ev, all);
    std::vector<cplx> c;
    for (auto i : all) c.push_back(cfg.points[i].c);
    bool clamped = false;
    res.main.lhs = l2_norm_sq(g, c, &clamped);
    if (clamped) res.main.flags.push_back("clamped");
    double per_k = 0;
    for (const auto& [k, rw] : rows) per_k += std::max(0.0, cross_inner(g, rw, rw, c).real());
    const double N = split_threshold(u, eps);
    double cross = 0;
    for (const auto& [k, rk] : rows)
        for (const auto& [kp, rkp] : rows)
            if (k > kp && kp > N) cross += std::abs(cross_inner(g, rkp, rk, c));
    res.comparable.lhs = per_k;
    res.comparable.rhs = res.main.rhs;
    res.cross.lhs = cross;
    res.cross.rhs = res.main.rhs;
    res.slice_split.lhs = res.main.lhs;
    res.slice_split.rhs = N * (per_k + cross);
    res.slice_split_tight.lhs = res.main.lhs;
    res.slice_split_tight.rhs = double(rows.size()) * (per_k + cross);
    for (auto* r : {&res.main, &res.comparable, &res.cross, &res.slice_split, &res.slice_split_tight}) finalize_ratio(*r);
    const double slack = 1e-9 * res.main.lhs;
    if (res.slice_split.lhs > res.slice_split.rhs + slack) res.slice_split.flags.push_back("violated");
    if (res.slice_split_tight.lhs > res.slice_split_tight.rhs + slack) res.slice_split_tight.flags.push_back("violated");
    return res;
}

BoundReport verify_l2_tensor(const Configuration& cfg, const kernel::ResonantEvaluator& ev, const density::Gamma1& g1,
                             const density::Gamma2& g2, int j, double u, double eps, double a_exp) {
    if (cfg.space.d != 4) throw UnsupportedDimension("verify_l2_tensor: d = 4 only");
    BoundReport r;
    r.lemma = "l2-tensor";
    r.d = 4;
    r.j = j;
    r.u = u;
    r.eps = eps;
    r.a_exp = a_exp;
    std::set<int> ks;
    for (const auto& p : cfg.points) ks.insert(density::slice_index(p.r));
    Configuration merged;
    merged.space = cfg.space;
    Ids all;
    double rhs_sum = 0;
    for (int k : ks) {
        TensorSelection sel = tensor_selection(cfg, g1, g2, j, k, u);
        for (const auto& f : sel.flags)
            if (!r.flagged(f)) r.flags.push_back(f);
        for (const auto& [l, c] : sel.level_counts)
            if (l >= j) rhs_sum += std::exp2((l - j) / 10.0) * std::exp2(3.0 * k) * double(c);
        for (auto i : sel.ids) {
            all.push_back(merged.points.size());
            merged.points.push_back(sel.config.points[i]);
        }
    }
    r.rhs = std::pow(u, a_exp + eps) * std::exp2(2.0 * j) * rhs_sum;
    if (all.empty()) {
        r.flags.push_back("degenerate");
        return r;
    }
    GramMatrix g = gram(merged, ev, all);
    std::vector<cplx> c;
    for (auto i : all) c.push_back(merged.points[i].c);
    bool clamped = false;
    r.lhs = l2_norm_sq(g, c, &clamped);
    if (clamped) r.flags.push_back("clamped");
    finalize_ratio(r);
    return r;
}

// ---------------------------------------------------------------- interpolation lemma

bool interpolation_hypothesis(const InterpolationCheckInput& in) {
    for (std::size_t i = 0; i < in.F.size(); ++i)
        for (double pv : {in.p0, in.p1}) {
            double norm = 0;
            for (std::size_t a = 0; a < in.weights.size(); ++a) norm += std::pow(std::abs(in.F[i][a]), pv) * in.weights[a];
            double bound = std::exp2(in.scales[i] * pv) * std::pow(in.M, pv) * in.s[i];
            if (norm > bound * (1 + 1e-12)) return false;
        }
    return true;
}

BoundReport dyadic_interp_check(const InterpolationCheckInput& in, double C) {
    if (!(in.p0 < in.p && in.p < in.p1)) throw InvalidArgument("dyadic_interp_check: need p0 < p < p1");
    if (in.F.size() != in.scales.size() || in.F.size() != in.s.size())
        throw InvalidArgument("dyadic_interp_check: F, scales and s must have equal length");
    for (const auto& f : in.F)
        if (f.size() != in.weights.size()) throw InvalidArgument("dyadic_interp_check: F_j has wrong atom count");
    BoundReport r;
    r.lemma = "dyad";
    r.d = 0;
    if (!interpolation_hypothesis(in)) r.flags.push_back("hypothesis-violated");
    for (std::size_t a = 0; a < in.weights.size(); ++a) {
        double s = 0;
        for (const auto& f : in.F) s += f[a];
        r.lhs += std::pow(std::abs(s), in.p) * in.weights[a];
    }
    double sum = 0;
    for (std::size_t i = 0; i < in.F.size(); ++i) sum += std::exp2(in.scales[i] * in.p) * in.s[i];
    r.rhs = std::pow(C, in.p) * std::pow(in.M, in.p) * sum;
    finalize_ratio(r);
    return r;
}

// ---------------------------------------------------------------- spatial profiles

namespace {
using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
}

RadialProfile::RadialProfile(const kernel::KernelProfile& prof, double r, int nodes) : r_(r) {
    const int d = prof.d;
    hw_ = prof.shell_halfwidth();
    lo_ = std::max(0.0, r - hw_);
    hi_ = r + hw_;
    // rho-nodes with weights w a(rho) rho^{d-1} B_d(r rho) (2 pi)^{-d} r^{d-1}
    using G = boost::math::quadrature::gauss<double, 20>;
    std::vector<double> gx, gw;
    for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
        double x = G::abscissa()[i], w = G::weights()[i];
        gx.push_back(x);
        gw.push_back(w);
        if (x != 0) {
            gx.push_back(-x);
            gw.push_back(w);
        }
    }
    const double a0 = prof.rho_lo, a1 = prof.rho_max;
    const double len = std::min(2 * M_PI / (r + hi_ + 1.0), (a1 - a0) / 16);
    const int npan = std::max(16, static_cast<int>(std::ceil((a1 - a0) / len)));
    const double step = (a1 - a0) / npan;
    const double pref = std::pow(2 * M_PI, -d) * std::pow(r, d - 1);
    std::vector<double> rho, W;
    for (int p = 0; p < npan; ++p) {
        double c = a0 + (p + 0.5) * step, h = 0.5 * step;
        for (std::size_t i = 0; i < gx.size(); ++i) {
            double x = c + h * gx[i];
            rho.push_back(x);
            W.push_back(pref * h * gw[i] * prof.a(x) * std::pow(x, d - 1) * kernel::surface_transform(d, r * x));
        }
    }
    std::vector<double> vals(nodes);
    const double ds = (hi_ - lo_) / (nodes - 1);
    for (int i = 0; i < nodes; ++i) {
        double s = lo_ + i * ds, acc = 0;
        for (std::size_t q = 0; q < rho.size(); ++q) acc += W[q] * kernel::surface_transform(d, s * rho[q]);
        vals[i] = acc;
    }
    auto sp = std::make_shared<Spline>(vals.begin(), vals.end(), lo_, ds);
    spline_ = std::shared_ptr<const void>(sp, sp.get());
}

double RadialProfile::operator()(double s) const {
    if (s < lo_ || s > hi_) return 0.0;
    return (*static_cast<const Spline*>(spline_.get()))(s);
}

double direct_lp_norm(const Configuration& cfg, const Ids& ids, const std::vector<cplx>& coeffs, double p,
                      const kernel::KernelProfile& prof, const GridSpec& grid) {
    const int d = cfg.space.d;
    check_space(cfg.space, 3, 4);
    if (prof.d != d) throw InvalidArgument("direct_lp_norm: profile dimension differs from configuration");
    if (!(p > 1 && p <= 2)) throw InvalidArgument("direct_lp_norm: p must lie in (1, 2]");
    if (coeffs.size() != ids.size()) throw InvalidArgument("direct_lp_norm: coefficient count mismatch");
    if (ids.empty()) return 0.0;
    const double hw = prof.shell_halfwidth(), h = grid.step;
    Vec4 lo{}, hi{};
    for (int c = 0; c < d; ++c) {
        lo[c] = 1e300;
        hi[c] = -1e300;
    }
    for (auto i : ids) {
        const auto& P = cfg.points[i];
        for (int c = 0; c < d; ++c) {
            lo[c] = std::min(lo[c], P.y[c] - P.r - hw - grid.pad);
            hi[c] = std::max(hi[c], P.y[c] + P.r + hw + grid.pad);
        }
    }
    std::array<long, 4> n{1, 1, 1, 1};
    double total = 1;
    for (int c = 0; c < d; ++c) {
        n[c] = static_cast<long>(std::ceil((hi[c] - lo[c]) / h));
        total *= double(n[c]);
    }
    if (total > grid.max_points) throw FeasibilityError("direct_lp_norm: grid exceeds the point budget");
    std::map<double, RadialProfile> cache;
    std::vector<const RadialProfile*> prof_of;
    for (auto i : ids) {
        double r = cfg.points[i].r;
        auto it = cache.find(r);
        if (it == cache.end()) it = cache.emplace(r, RadialProfile(prof, r, std::max(1200, static_cast<int>(800 * hw * prof.rho_max / 10)))).first;
        prof_of.push_back(&it->second);
    }
    double sum = 0;
    Vec4 x{};
    for (long i0 = 0; i0 < n[0]; ++i0) {
        x[0] = lo[0] + (i0 + 0.5) * h;
        for (long i1 = 0; i1 < n[1]; ++i1) {
            x[1] = lo[1] + (i1 + 0.5) * h;
            for (long i2 = 0; i2 < n[2]; ++i2) {
                x[2] = lo[2] + (i2 + 0.5) * h;
                for (long i3 = 0; i3 < n[3]; ++i3) {
                    if (d == 4) x[3] = lo[3] + (i3 + 0.5) * h;
                    cplx v(0, 0);
                    for (std::size_t q = 0; q < ids.size(); ++q) {
                        const auto& P = cfg.points[ids[q]];
                        double s = dist(x, P.y);
                        if (std::abs(s - P.r) <= hw) v += coeffs[q] * (*prof_of[q])(s);
                    }
                    if (v != cplx(0, 0)) sum += std::pow(std::abs(v), p);
                }
            }
        }
    }
    return sum * std::pow(h, d);
}

RowSup row_transform_sup(const Space& space, double r, const kernel::KernelProfile& prof) {
    check_space(space, 3, 4);
    if (r < 1) throw InvalidArgument("row_transform_sup: r must be >= 1");
    if (prof.d != space.d) throw InvalidArgument("row_transform_sup: profile dimension mismatch");
    RowSup out;
    const double end = prof.grid_end();
    const double step = std::min(M_PI / (16 * r), end / 4096);
    for (double rho = step; rho <= end; rho += step) {
        double v = std::abs(kernel::surface_fourier(space, r, rho) * prof.psi0_hat(rho));
        if (v > out.sup) {
            out.sup = v;
            out.rho_at_sup = rho;
        }
    }
    out.ratio = out.sup / std::pow(r, 0.5 * (space.d - 1));
    return out;
}

}  // namespace wavesum::harness
