#include "wavesum/geometry.hpp"

#include <algorithm>
#include <cstdio>

namespace wavesum::geometry {

bool contains(const AnnulusSpec& a, const Vec4& x) {
    double s = dist(a.center, x);
    return s >= a.t && s <= a.t + a.w;
}

double annulus_volume(int d, const AnnulusSpec& a) {
    return ball_volume(d) * (std::pow(a.t + a.w, d) - std::pow(a.t, d));
}

const char* method_name(VolumeMethod m) {
    switch (m) {
    case VolumeMethod::mc: return "mc";
    case VolumeMethod::grid: return "grid";
    case VolumeMethod::localized: return "localized";
    }
    return "?";
}

std::vector<std::string> triple_preconditions(const TripleConfig& cfg) {
    std::vector<std::string> flags;
    const auto& A = cfg.annuli;
    if (A[1].t != A[0].t || A[2].t != A[0].t || A[1].w != A[0].w || A[2].w != A[0].w)
        flags.push_back("unequal-annuli");
    for (const auto& a : A)
        if (!(a.t > 0 && a.w > 0)) flags.push_back("nonpositive-radius-or-thickness");
    for (const auto& a : A)
        if (a.t < std::ldexp(1.0, cfg.j - 1) || a.t > std::ldexp(1.0, cfg.j + 1)) {
            flags.push_back("t-outside-scale");
            break;
        }
    if (cfg.l > cfg.j) flags.push_back("l-above-j");
    bool low = false, high = false;
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            double D = cfg.distance(a, b);
            low = low || D < std::ldexp(1.0, cfg.l);
            high = high || D > std::ldexp(1.0, cfg.j) / 10.0;
        }
    if (low) flags.push_back("distance-below-2^l");
    if (high) flags.push_back("distance-above-2^j/10");
    return flags;
}

namespace {

struct Frame {
    Vec4 e;       // unit vector along c2 - c1
    double D;     // |c2 - c1|
};

Frame frame(const Vec4& c1, const Vec4& c2) {
    Vec4 v = sub(c2, c1);
    double D = norm(v);
    if (D == 0) throw InvalidArgument("coincident annulus centers");
    return {scale(v, 1.0 / D), D};
}

// (a^2 - b^2) without forming the squares.
double dsq(double a, double b) { return (a - b) * (a + b); }

struct BandBox {
    double zlo, zhi, rlo, rhi;
};

// Box in (axial coordinate, distance to axis) containing the cross-section of A1 n A2.
BandBox band_box(const AnnulusSpec& a1, const AnnulusSpec& a2, double D) {
    const double t1 = a1.t, T1 = a1.t + a1.w, t2 = a2.t, T2 = a2.t + a2.w;
    BandBox b;
    b.zlo = std::max((dsq(t1, T2) + D * D) / (2 * D), -T1);
    b.zhi = std::min((dsq(T1, t2) + D * D) / (2 * D), T1);
    auto minsq = [](double lo, double hi) { return (lo <= 0 && hi >= 0) ? 0.0 : std::min(lo * lo, hi * hi); };
    auto maxabs = [](double lo, double hi) { return std::max(std::abs(lo), std::abs(hi)); };
    double m1 = std::sqrt(minsq(b.zlo, b.zhi)), m2 = std::sqrt(minsq(b.zlo - D, b.zhi - D));
    double rhi1 = m1 < T1 ? std::sqrt(dsq(T1, m1)) : 0.0;
    double rhi2 = m2 < T2 ? std::sqrt(dsq(T2, m2)) : 0.0;
    b.rhi = std::min(rhi1, rhi2);
    double M1 = maxabs(b.zlo, b.zhi), M2 = maxabs(b.zlo - D, b.zhi - D);
    double rlo1 = M1 < t1 ? std::sqrt(dsq(t1, M1)) : 0.0;
    double rlo2 = M2 < t2 ? std::sqrt(dsq(t2, M2)) : 0.0;
    b.rlo = std::max(rlo1, rlo2);
    return b;
}

Vec4 random_direction(CounterRng& rng, int d) {
    Vec4 v{};
    double n2 = 0;
    while (n2 < 1e-24) {
        n2 = 0;
        for (int i = 0; i < d; ++i) {
            v[i] = rng.normal();
            n2 += v[i] * v[i];
        }
    }
    return scale(v, 1.0 / std::sqrt(n2));
}

VolumeEstimate volume_mc(const TripleConfig& cfg, const VolumeOptions& opt) {
    const int d = cfg.space.d;
    const auto& A = cfg.annuli;
    const double lo = std::pow(A[0].t, d), hi = std::pow(A[0].t + A[0].w, d);
    long hits = 0;
    for (long i = 0; i < opt.samples; ++i) {
        CounterRng rng(opt.seed, static_cast<std::uint64_t>(i));
        double s = std::pow(lo + rng.uniform() * (hi - lo), 1.0 / d);
        Vec4 x = add(A[0].center, scale(random_direction(rng, d), s));
        hits += contains(A[1], x) && contains(A[2], x);
    }
    const double vol = annulus_volume(d, A[0]);
    const double p = double(hits) / double(opt.samples);
    VolumeEstimate est;
    est.value = vol * p;
    est.standard_error = vol * std::sqrt(std::max(p * (1 - p), 1.0 / double(opt.samples)) / double(opt.samples));
    if (hits == 0) est.flags.push_back("no-hits");
    return est;
}

VolumeEstimate volume_grid(const TripleConfig& cfg, const VolumeOptions& opt) {
    if (cfg.space.d != 3) throw UnsupportedDimension("grid volume is implemented for d = 3");
    const auto& A = cfg.annuli;
    const double h = opt.grid_step;
    Vec4 lo{}, hi{};
    for (int c = 0; c < 3; ++c) {
        lo[c] = -1e300;
        hi[c] = 1e300;
        for (const auto& a : A) {
            lo[c] = std::max(lo[c], a.center[c] - a.t - a.w);
            hi[c] = std::min(hi[c], a.center[c] + a.t + a.w);
        }
    }
    if (lo[0] > hi[0] || lo[1] > hi[1] || lo[2] > hi[2]) return {};
    double columns = (hi[0] - lo[0]) / h * (hi[1] - lo[1]) / h;
    if (columns * opt.grid_shifts > 4e8) throw FeasibilityError("grid volume: too many grid columns");
    const Vec4& o = A[0].center;
    std::vector<double> vals;
    for (int sh = 0; sh < opt.grid_shifts; ++sh) {
        CounterRng rng(opt.seed, 0x67726964ull + static_cast<std::uint64_t>(sh));
        double u[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
        auto first = [&](int c, double v) { return static_cast<long long>(std::ceil((v - o[c]) / h - u[c])); };
        auto last = [&](int c, double v) { return static_cast<long long>(std::floor((v - o[c]) / h - u[c])); };
        long long count = 0;
        for (long long ix = first(0, lo[0]); ix <= last(0, hi[0]); ++ix) {
            double x = o[0] + (ix + u[0]) * h;
            for (long long iy = first(1, lo[1]); iy <= last(1, hi[1]); ++iy) {
                double y = o[1] + (iy + u[1]) * h;
                double zl = lo[2], zh = hi[2];
                bool empty = false;
                for (const auto& a : A) {
                    double q = (a.t + a.w) * (a.t + a.w) - (x - a.center[0]) * (x - a.center[0]) -
                               (y - a.center[1]) * (y - a.center[1]);
                    if (q < 0) {
                        empty = true;
                        break;
                    }
                    double half = std::sqrt(q);
                    zl = std::max(zl, a.center[2] - half);
                    zh = std::min(zh, a.center[2] + half);
                }
                if (empty || zl > zh) continue;
                for (long long iz = first(2, zl); iz <= last(2, zh); ++iz) {
                    Vec4 p{x, y, o[2] + (iz + u[2]) * h, 0};
                    count += contains(A[0], p) && contains(A[1], p) && contains(A[2], p);
                }
            }
        }
        vals.push_back(double(count) * h * h * h);
    }
    VolumeEstimate est;
    double mean = 0;
    for (double v : vals) mean += v;
    mean /= double(vals.size());
    double var = 0;
    for (double v : vals) var += (v - mean) * (v - mean);
    est.value = mean;
    est.standard_error = vals.size() > 1 ? std::sqrt(var / double(vals.size() - 1) / double(vals.size())) : 0.0;
    return est;
}

// Angular measure of {phi in (-pi, pi] : lo <= 1 - cos(phi) <= hi}.
double angular_measure(double lo, double hi) {
    lo = std::clamp(lo, 0.0, 2.0);
    hi = std::clamp(hi, 0.0, 2.0);
    if (hi <= lo) return 0.0;
    auto phi = [](double h) { return 2.0 * std::asin(std::sqrt(h / 2.0)); };
    return 2.0 * (phi(hi) - phi(lo));
}

VolumeEstimate volume_localized(const TripleConfig& cfg, const VolumeOptions& opt) {
    if (cfg.space.d != 3) throw UnsupportedDimension("localized volume is implemented for d = 3");
    const auto& A = cfg.annuli;
    Frame f = frame(A[0].center, A[1].center);
    BandBox box = band_box(A[0], A[1], f.D);
    VolumeEstimate est;
    if (box.zlo >= box.zhi || box.rlo >= box.rhi) {
        est.certified_zero = true;
        est.certificate = "first two annuli are disjoint";
        return est;
    }
    // Nearly concentric pairs make the box a large part of the annulus; sample the annulus instead.
    if (box.zhi - box.zlo > A[0].t) {
        est = volume_mc(cfg, opt);
        est.flags.push_back("localized-fallback");
        return est;
    }
    Vec4 v = sub(A[2].center, A[0].center);
    const double z3 = dot(v, f.e);
    const double rho3 = norm(sub(v, scale(f.e, z3)));
    const double t1 = A[0].t, T1 = A[0].t + A[0].w, t2 = A[1].t, T2 = A[1].t + A[1].w;
    const double t3 = A[2].t, T3 = A[2].t + A[2].w;
    const double area = (box.zhi - box.zlo) * (box.rhi - box.rlo);
    double sum = 0, sum2 = 0;
    for (long i = 0; i < opt.samples; ++i) {
        CounterRng rng(opt.seed, static_cast<std::uint64_t>(i));
        double z = rng.uniform(box.zlo, box.zhi);
        double rho = rng.uniform(box.rlo, box.rhi);
        double s1 = std::hypot(z, rho), s2 = std::hypot(z - f.D, rho);
        double g = 0;
        if (s1 >= t1 && s1 <= T1 && s2 >= t2 && s2 <= T2) {
            // |x - c3|^2 = q + 2 rho rho3 (1 - cos phi)
            double q = (z - z3) * (z - z3) + (rho - rho3) * (rho - rho3);
            double m;
            if (rho * rho3 == 0) {
                m = (q >= t3 * t3 && q <= T3 * T3) ? 2 * M_PI : 0.0;
            } else {
                double den = 2 * rho * rho3;
                m = angular_measure((t3 * t3 - q) / den, (T3 * T3 - q) / den);
            }
            g = rho * m * area;
        }
        sum += g;
        sum2 += g * g;
    }
    const double n = double(opt.samples);
    est.value = sum / n;
    est.standard_error = std::sqrt(std::max(0.0, sum2 / n - est.value * est.value) / n);
    return est;
}

}  // namespace

std::string DisjointnessCertificate::describe() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "band12=[%.17g,%.17g] band13-projection=[%.17g,%.17g] %s", band12_lo, band12_hi,
                  band13_lo, band13_hi, disjoint ? "disjoint" : "overlapping");
    return buf;
}

DisjointnessCertificate slab_certificate(const TripleConfig& cfg) {
    const auto& A = cfg.annuli;
    Frame f12 = frame(A[0].center, A[1].center);
    Frame f13 = frame(A[0].center, A[2].center);
    BandBox b12 = band_box(A[0], A[1], f12.D);
    BandBox b13 = band_box(A[0], A[2], f13.D);
    DisjointnessCertificate c;
    c.band12_lo = b12.zlo;
    c.band12_hi = b12.zhi;
    double cs = dot(f12.e, f13.e);
    double sn = norm(sub(f13.e, scale(f12.e, cs)));
    double a = b13.zlo * cs, b = b13.zhi * cs;
    c.band13_lo = std::min(a, b) - b13.rhi * sn;
    c.band13_hi = std::max(a, b) + b13.rhi * sn;
    c.disjoint = b12.zlo > b12.zhi || b13.zlo > b13.zhi || c.band13_hi < c.band12_lo || c.band13_lo > c.band12_hi;
    return c;
}

VolumeEstimate triple_volume(const TripleConfig& cfg, const VolumeOptions& opt) {
    check_space(cfg.space, 2, 4);
    if (opt.samples <= 0) throw InvalidArgument("triple_volume: samples must be positive");
    std::vector<std::string> pre = triple_preconditions(cfg);
    if (opt.strict && !pre.empty()) throw FeasibilityError("triple_volume preconditions: " + pre.front());
    VolumeEstimate est;
    DisjointnessCertificate cert = slab_certificate(cfg);
    if (cert.disjoint) {
        est.certified_zero = true;
        est.certificate = cert.describe();
    } else {
        switch (opt.method) {
        case VolumeMethod::mc: est = volume_mc(cfg, opt); break;
        case VolumeMethod::grid: est = volume_grid(cfg, opt); break;
        case VolumeMethod::localized: est = volume_localized(cfg, opt); break;
        }
    }
    est.method = opt.method;
    est.samples = opt.method == VolumeMethod::grid ? opt.grid_shifts : opt.samples;
    est.seed = opt.seed;
    est.flags.insert(est.flags.end(), pre.begin(), pre.end());
    return est;
}

GeomBound geom_bound(const Space& space, int j, int l, int threshold_offset) {
    if (space.d == 2) throw UnsupportedDimension("geom_bound: d = 2 has no triple-intersection bound");
    check_space(space, 3, 4);
    if (l > j) throw InvalidArgument("geom_bound: l must not exceed j");
    GeomBound g;
    g.bound = std::ldexp(1.0, 3 * (j - l) + (space.d == 4 ? j : 0));
    g.applicable = 2 * l >= j + 2 * threshold_offset;
    return g;
}

ArcReport pair_arc_2d(const AnnulusSpec& a1, const AnnulusSpec& a2, long samples, std::uint64_t seed,
                      double constant) {
    for (const auto* a : {&a1, &a2})
        if (a->center[2] != 0 || a->center[3] != 0) throw UnsupportedDimension("pair_arc_2d: planar centers only");
    if (std::abs(a1.t - a2.t) > 1e-12 * a1.t || std::abs(a1.w - 1) > 1e-12 || std::abs(a2.w - 1) > 1e-12)
        throw InvalidArgument("pair_arc_2d: equal radii and unit thickness required");
    const double R = a1.t;
    const double D = dist(a1.center, a2.center);
    ArcReport rep;
    rep.constant = constant;
    if (D == 0) {
        rep.degenerate = true;
        return rep;
    }
    if (D > R / 5) throw InvalidArgument("pair_arc_2d: center distance exceeds R/5");
    const Vec4 e = scale(sub(a2.center, a1.center), 1.0 / D);
    const Vec4 en{-e[1], e[0], 0, 0};
    const double mid = R + 0.5 * a1.w;
    rep.arc_center_angle = std::acos(std::min(1.0, D / (2 * mid)));
    rep.arc_length_bound = constant * R / D;
    const double half = std::min(M_PI, 0.5 * rep.arc_length_bound / R);
    const double lo = R * R, hi = (R + a1.w) * (R + a1.w);
    auto arc_distance = [&](double s, double phi, double centre) {
        double delta = std::remainder(phi - centre, 2 * M_PI);
        if (std::abs(delta) <= half) return std::abs(s - R);
        double end = centre + (delta > 0 ? half : -half);
        double dx = s * std::cos(phi) - R * std::cos(end), dy = s * std::sin(phi) - R * std::sin(end);
        return std::hypot(dx, dy);
    };
    rep.contained = true;
    rep.max_excess = -10;
    for (long i = 0; i < samples; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        double s = std::sqrt(lo + rng.uniform() * (hi - lo));
        double phi = rng.uniform(-M_PI, M_PI);
        Vec4 x = add(a1.center, add(scale(e, s * std::cos(phi)), scale(en, s * std::sin(phi))));
        if (!contains(a2, x)) continue;
        ++rep.hits;
        double dd = std::min(arc_distance(s, phi, rep.arc_center_angle), arc_distance(s, phi, -rep.arc_center_angle));
        rep.max_excess = std::max(rep.max_excess, dd - 10);
    }
    rep.samples = samples;
    rep.contained = rep.max_excess <= 0;
    return rep;
}

std::optional<AnnulusSpec> slice_4d(const AnnulusSpec& a, double offset) {
    const double h = std::abs(offset), T = a.t + a.w;
    if (h >= T) return std::nullopt;
    AnnulusSpec s;
    s.center = {a.center[0], a.center[1], a.center[2], 0};
    s.t = h < a.t ? std::sqrt(dsq(a.t, h)) : 0.0;
    s.w = std::sqrt(dsq(T, h)) - s.t;
    return s;
}

}  // namespace wavesum::geometry
