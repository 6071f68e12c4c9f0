#include "wavesum/kernel.hpp"

#include <algorithm>
#include <cfloat>
#include <cstdlib>
#include <filesystem>
#include <functional>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>

namespace wavesum {

void check_space(const Space& s, int lo, int hi) {
    if (s.d < lo || s.d > hi)
        throw UnsupportedDimension("dimension " + std::to_string(s.d) + " not supported here");
}

namespace kernel {

namespace {

using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

// Gauss-Legendre rules expanded to full node lists on [-1, 1].
struct Rule {
    std::vector<double> x, w;
};
template <int N>
Rule make_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    Rule r;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    for (std::size_t i = 0; i < ab.size(); ++i) {
        if (ab[i] == 0.0) {
            r.x.push_back(0.0);
            r.w.push_back(wt[i]);
        } else {
            r.x.push_back(ab[i]);
            r.w.push_back(wt[i]);
            r.x.push_back(-ab[i]);
            r.w.push_back(wt[i]);
        }
    }
    return r;
}
const Rule& rule20() {
    static const Rule r = make_rule<20>();
    return r;
}
const Rule& rule15() {
    static const Rule r = make_rule<15>();
    return r;
}

// Gamma(nu+1) (2/x)^nu J_nu(x), equal to 1 at x = 0.
double normalized_bessel(double nu, double x) {
    if (x * x <= nu + 1.0) {
        double term = 1.0, sum = 1.0, q = -0.25 * x * x;
        for (int k = 1; k < 200; ++k) {
            term *= q / (k * (nu + k));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    double j = boost::math::cyl_bessel_j(nu, x);
    if (j == 0.0) return 0.0;
    double lg = std::log(std::abs(j)) + nu * std::log(2.0 / x) + std::lgamma(nu + 1.0);
    return std::copysign(std::exp(lg), j);
}

// J_1(x)/x, with the Hankel expansion for large x.
double j1_over_x(double x) {
    double ax = std::abs(x);
    if (ax < 1e-4) return 0.5 * (1.0 - x * x / 8.0);
    if (ax < 40.0) return boost::math::cyl_bessel_j(1, ax) / ax;
    // P, Q series for nu = 1; 14 terms give full double accuracy for x >= 40
    double inv = 1.0 / ax, p = 0, q = 0, ak = 1.0, pw = 1.0;
    for (int k = 0; k < 16; ++k) {
        if (k > 0) {
            double m = 2.0 * k - 1.0;
            ak *= (4.0 - m * m) / (8.0 * k);
            pw *= inv;
        }
        double t = ak * pw;
        switch (k % 4) {
        case 0: p += t; break;
        case 1: q += t; break;
        case 2: p -= t; break;
        case 3: q -= t; break;
        }
    }
    double chi = ax - 0.75 * M_PI;
    double j1 = std::sqrt(2.0 / (M_PI * ax)) * (p * std::cos(chi) - q * std::sin(chi));
    return j1 / ax;
}

}  // namespace

// ---------------------------------------------------------------- profile

double bump_transform_ratio(int d, int n, double support_radius, double rho) {
    return normalized_bessel(n + 0.5 * d, support_radius * rho);
}

void KernelProfile::build_interpolant() {
    if (samples.size() < 8) throw InvalidArgument("profile has too few samples");
    auto sp = std::make_shared<Spline>(samples.begin(), samples.end(), std::log(rho_min), log_step);
    spline_ = std::shared_ptr<const void>(sp, sp.get());
}

double KernelProfile::psi0_hat(double rho) const {
    if (rho <= 0) return 0.0;
    if (rho < rho_min) return samples.front() * std::pow(rho / rho_min, order);
    if (rho > grid_end()) return 0.0;
    if (rho < rho_lo) {
        // exact below the window; the spline carries absolute noise there
        const double nu = bump_exponent + 0.5 * d;
        const double log_peak = log_scale - d * std::log(support_radius) - 0.5 * d * std::log(M_PI) -
                                std::lgamma(bump_exponent + 1.0) + std::lgamma(nu + 1.0);
        const double lam = normalized_bessel(nu, support_radius * rho);
        if (lam == 0.0) return 0.0;
        const double sgn = (order / 2) % 2 == 0 ? 1.0 : -1.0;
        return sgn * std::copysign(std::exp(order * std::log(rho) + std::log(std::abs(lam)) - log_peak), lam);
    }
    const auto* sp = static_cast<const Spline*>(spline_.get());
    return (*sp)(std::log(rho));
}

double KernelProfile::a(double rho) const {
    double p = psi0_hat(rho);
    return p * p;
}

KernelProfile build_profile(const Space& space, int order, double support_radius, double tol) {
    check_space(space, 3, 4);
    if (order < 2 || order % 2 != 0) throw InvalidArgument("make_bump: order must be even and >= 2");
    if (!(support_radius > 0 && support_radius <= 0.5))
        throw InvalidArgument("make_bump: support_radius must lie in (0, 1/2]");
    if (!(tol > 0 && tol < 1)) throw InvalidArgument("make_bump: tol must lie in (0, 1)");

    KernelProfile p;
    p.d = space.d;
    p.order = order;
    p.support_radius = support_radius;
    p.tol = tol;
    p.bump_exponent = order + 20;
    const double nu = p.bump_exponent + 0.5 * space.d;
    const double R = support_radius;

    auto logabs = [&](double rho) {
        double lam = normalized_bessel(nu, R * rho);
        return order * std::log(rho) + std::log(std::abs(lam));
    };

    // coarse scan to locate the peak and the window where a >= tol * max a
    const double rho_s = std::sqrt(2.0 * order * (nu + 1.0)) / R;
    const double scan_lo = 1e-3 * rho_s, scan_hi = 50.0 * rho_s, ratio = 1.0005;
    std::vector<double> rs, ls;
    for (double rho = scan_lo; rho <= scan_hi; rho *= ratio) {
        rs.push_back(rho);
        ls.push_back(logabs(rho));
    }
    std::size_t ipk = std::max_element(ls.begin(), ls.end()) - ls.begin();
    const double log_peak = ls[ipk];
    const double thresh = log_peak + 0.5 * std::log(tol);
    std::size_t ilo = 0, ihi = 0;
    for (std::size_t i = 0; i < ls.size(); ++i)
        if (ls[i] >= thresh) {
            if (ilo == 0 && ihi == 0) ilo = i;
            ihi = i;
        }
    if (ihi + 1 >= ls.size() || ilo == 0)
        throw QuadratureError("make_bump: tolerance unachievable within the scanned window");

    p.rho_lo = rs[ilo - 1];
    p.rho_max = rs[ihi + 1];
    p.rho_min = scan_lo;
    p.log_step = std::min(2e-3, 0.02 * std::pow(tol, 0.25));
    const double end = p.rho_max * 1.02;
    const std::size_t n = static_cast<std::size_t>(std::ceil(std::log(end / p.rho_min) / p.log_step)) + 1;
    p.samples.resize(n);
    const double sgn = (order / 2) % 2 == 0 ? 1.0 : -1.0;
    double best = -1;
    for (std::size_t i = 0; i < n; ++i) {
        double rho = p.rho_min * std::exp(p.log_step * double(i));
        double lam = normalized_bessel(nu, R * rho);
        double v = lam == 0.0 ? 0.0
                              : sgn * std::copysign(std::exp(order * std::log(rho) + std::log(std::abs(lam)) - log_peak), lam);
        p.samples[i] = v;
        if (v * v > best) {
            best = v * v;
            p.rho_peak = rho;
        }
    }
    // b_hat(0) = R^d pi^{d/2} Gamma(n+1) / Gamma(n+d/2+1)
    p.log_scale = log_peak + space.d * std::log(R) + 0.5 * space.d * std::log(M_PI) +
                  std::lgamma(p.bump_exponent + 1.0) - std::lgamma(nu + 1.0);
    p.build_interpolant();
    return p;
}

KernelProfile make_bump(const Space& space, int order, double support_radius, double tol) {
    const char* dir = std::getenv("WAVESUM_CACHE_DIR");
    if (!dir || !*dir) return build_profile(space, order, support_radius, tol);
    std::filesystem::path path = std::filesystem::path(dir) / profile_cache_key(space.d, order, support_radius, tol);
    if (auto cached = load_profile(path.string())) return *cached;
    KernelProfile p = build_profile(space, order, support_radius, tol);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (!ec) save_profile(p, path.string());
    return p;
}

// ---------------------------------------------------------------- B_d

double surface_transform(int d, double s) {
    s = std::abs(s);
    switch (d) {
    case 3:
        if (s < 1e-4) return 4.0 * M_PI * (1.0 - s * s / 6.0);
        return 4.0 * M_PI * std::sin(s) / s;
    case 4: return 4.0 * M_PI * M_PI * j1_over_x(s);
    default: throw UnsupportedDimension("surface_fourier: d must be 3 or 4");
    }
}

double surface_fourier(const Space& space, double r, double rho) {
    if (space.d != 3 && space.d != 4) throw UnsupportedDimension("surface_fourier: d must be 3 or 4");
    if (r < 1) throw InvalidArgument("surface_fourier: r must be >= 1");
    if (rho < 0) throw InvalidArgument("surface_fourier: rho must be >= 0");
    return std::pow(r, space.d - 1) * surface_transform(space.d, r * rho);
}

AsymptoticExpansion make_expansion(int d, int M) {
    if (M < 0) throw InvalidArgument("make_expansion: M must be >= 0");
    AsymptoticExpansion e;
    e.d = d;
    e.M = M;
    if (d == 3) {
        // 4 pi sin x / x is its own expansion
        e.c_plus.assign(M + 1, cplx(0, 0));
        e.c_minus.assign(M + 1, cplx(0, 0));
        e.c_plus[0] = cplx(0, -2.0 * M_PI);
        e.c_minus[0] = cplx(0, 2.0 * M_PI);
        e.remainder_bound_constant = 0.0;
        return e;
    }
    if (d != 4) throw UnsupportedDimension("make_expansion: d must be 3 or 4");
    const double K = 4.0 * M_PI * M_PI * std::sqrt(2.0 / M_PI);
    const cplx rot = std::polar(1.0, -0.75 * M_PI);
    std::vector<double> ak(M + 3);
    ak[0] = 1.0;
    for (int k = 1; k < M + 3; ++k) {
        double m = 2.0 * k - 1.0;
        ak[k] = ak[k - 1] * (4.0 - m * m) / (8.0 * k);
    }
    cplx ik(1, 0);
    for (int k = 0; k <= M; ++k) {
        cplx beta = rot * ik * ak[k];
        e.c_plus.push_back(0.5 * K * beta);
        e.c_minus.push_back(0.5 * K * std::conj(beta));
        ik *= cplx(0, 1);
    }
    e.remainder_bound_constant = K * (std::abs(ak[M + 1]) + std::abs(ak[M + 2]));
    return e;
}

AsymptoticValue asymptotic_eval(const AsymptoticExpansion& e, double x) {
    if (!(x >= 1)) throw InvalidArgument("asymptotic_eval: x must be >= 1");
    const double h = 0.5 * (e.d - 1);
    cplx ep = std::polar(1.0, x), em = std::conj(ep);
    double value = 0, mag = 0;
    for (int k = 0; k <= e.M; ++k) {
        double pw = std::pow(x, -k - h);
        cplx t = (e.c_plus[k] * ep + e.c_minus[k] * em) * pw;
        value += t.real();
        mag += std::abs(t);
    }
    double err = 8.0 * DBL_EPSILON * mag + e.remainder_bound_constant * std::pow(x, -(e.M + 1) - h);
    return {value, err};
}

// ---------------------------------------------------------------- inner products

bool supports_disjoint(double r, double r2, double D, double hw) {
    return D > r + r2 + 2 * hw || r + D < r2 - 2 * hw || r2 + D < r - 2 * hw;
}

double scalar_product_distance(const KernelProfile& prof, double r, double r2, double D, const QuadOptions& opt) {
    if (r < 1 || r2 < 1) throw InvalidArgument("scalar_product: radii must be >= 1");
    if (!opt.force_quadrature && supports_disjoint(r, r2, D, prof.shell_halfwidth())) return 0.0;
    const int d = prof.d;
    const double pref = std::pow(2.0 * M_PI, -d) * std::pow(r * r2, d - 1);
    auto f = [&](double rho) {
        double a = prof.a(rho);
        return surface_transform(d, r * rho) * surface_transform(d, r2 * rho) * surface_transform(d, D * rho) * a * a *
               std::pow(rho, d - 1);
    };
    const Rule& g20 = rule20();
    const Rule& g15 = rule15();
    struct Est {
        double v20, v15, mass;
    };
    auto panel = [&](double lo, double hi) {
        double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        Est e{0, 0, 0};
        for (std::size_t i = 0; i < g20.x.size(); ++i) {
            double v = f(c + h * g20.x[i]);
            e.v20 += g20.w[i] * v;
            e.mass += g20.w[i] * std::abs(v);
        }
        for (std::size_t i = 0; i < g15.x.size(); ++i) e.v15 += g15.w[i] * f(c + h * g15.x[i]);
        e.v20 *= h;
        e.v15 *= h;
        e.mass *= h;
        return e;
    };
    std::function<double(double, double, Est, int)> refine = [&](double lo, double hi, Est e, int depth) -> double {
        if (std::abs(e.v20 - e.v15) <= opt.rel_tol * e.mass + 1e-300) return e.v20;
        if (depth >= opt.max_depth) throw QuadratureError("scalar_product: quadrature did not converge");
        double mid = 0.5 * (lo + hi);
        return refine(lo, mid, panel(lo, mid), depth + 1) + refine(mid, hi, panel(mid, hi), depth + 1);
    };
    const double lo = prof.rho_lo, hi = prof.rho_max;
    const double omega = r + r2 + D;
    double len = std::min(2.0 * M_PI / omega, (hi - lo) / 16.0);
    int npan = std::max(1, static_cast<int>(std::ceil((hi - lo) / len)));
    len = (hi - lo) / npan;
    double sum = 0;
    for (int i = 0; i < npan; ++i) {
        double a = lo + i * len, b = a + len;
        sum += refine(a, b, panel(a, b), 0);
    }
    return pref * sum;
}

cplx scalar_product(const KernelProfile& prof, const Space& space, const Vec4& y, double r, const Vec4& y2, double r2,
                    const QuadOptions& opt) {
    if (space.d != prof.d) throw InvalidArgument("scalar_product: profile built for a different dimension");
    return {scalar_product_distance(prof, r, r2, dist(y, y2), opt), 0.0};
}

ResonantEvaluator::ResonantEvaluator(const KernelProfile& profile, int terms)
    : profile_(&profile), exp_(make_expansion(profile.d, profile.d == 3 ? 0 : terms)) {
    const double bw = 4.0 * profile.support_radius;  // spectral width of a^2 in rho
    window_ = profile.d == 3 ? bw + 0.05 : bw + 0.6;
    x_min_ = profile.d == 3 ? 0.0 : 30.0;
    const Rule& g = rule20();
    const double lo = profile.rho_lo, hi = profile.rho_max;
    const double len = std::min(8.0, 2.0 * M_PI / (window_ + bw));
    int npan = std::max(4, static_cast<int>(std::ceil((hi - lo) / len)));
    double step = (hi - lo) / npan;
    for (int p = 0; p < npan; ++p) {
        double c = lo + (p + 0.5) * step, h = 0.5 * step;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            double rho = c + h * g.x[i];
            double a = profile.a(rho);
            nodes_.push_back(rho);
            wa2_.push_back(h * g.w[i] * a * a * std::pow(rho, profile.d - 1));
        }
    }
}

double ResonantEvaluator::resonant_term(int s1, int s2, int s3, double r, double r2, double D, int nfac) const {
    const int d = profile_->d;
    const double hexp = 0.5 * (d - 1);
    const double omega = s1 * r + s2 * r2 + s3 * D;
    auto coeffs = [&](int s, double x) {
        std::vector<cplx> c(exp_.M + 1);
        for (int k = 0; k <= exp_.M; ++k)
            c[k] = (s > 0 ? exp_.c_plus[k] : exp_.c_minus[k]) * std::pow(x, -k - hexp);
        return c;
    };
    auto c1 = coeffs(s1, r), c2 = coeffs(s2, r2);
    std::vector<cplx> c3;
    if (nfac == 3) c3 = coeffs(s3, D);
    cplx acc(0, 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        double rho = nodes_[i], inv = 1.0 / rho;
        auto horner = [&](const std::vector<cplx>& c) {
            cplx v(0, 0);
            for (int k = exp_.M; k >= 0; --k) v = v * inv + c[k];
            return v;
        };
        cplx f = horner(c1) * horner(c2);
        double pw = std::pow(inv, 2 * hexp);
        if (nfac == 3) {
            f *= horner(c3);
            pw *= std::pow(inv, hexp);
        }
        acc += wa2_[i] * pw * f * std::polar(1.0, omega * rho);
    }
    return acc.real();
}

double ResonantEvaluator::operator()(double r, double r2, double D) const {
    const KernelProfile& p = *profile_;
    if (r < 1 || r2 < 1) throw InvalidArgument("scalar_product: radii must be >= 1");
    if (supports_disjoint(r, r2, D, p.shell_halfwidth())) return 0.0;
    double xmin = std::min(r, r2);
    if (D > 0) xmin = std::min(xmin, D);
    if (xmin * p.rho_lo < x_min_) {
        fallbacks_.fetch_add(1, std::memory_order_relaxed);
        return scalar_product_distance(p, r, r2, D);
    }
    const int d = p.d;
    const double pref = std::pow(2.0 * M_PI, -d) * std::pow(r * r2, d - 1);
    double sum = 0;
    if (D == 0) {
        for (int s2 : {1, -1})
            if (std::abs(r + s2 * r2) <= window_) sum += 2.0 * resonant_term(1, s2, 0, r, r2, 0, 2);
        sum *= sphere_area(d);
    } else {
        for (int s2 : {1, -1})
            for (int s3 : {1, -1})
                if (std::abs(r + s2 * r2 + s3 * D) <= window_) sum += 2.0 * resonant_term(1, s2, s3, r, r2, D, 3);
    }
    return pref * sum;
}

// ---------------------------------------------------------------- bounds

double oscillatory_constant(int d, int N) {
    // Fitted with fit_oscillatory_constant on pair_corpus(k = 3..6, 2000 pairs,
    // seed 17) for the default profile (order 40, support 1/10, tol 1e-8),
    // rounded up to two significant digits.
    static const double c3[] = {0, 130, 130, 130, 130, 130, 130, 130, 130};
    static const double c4[] = {0, 200, 200, 200, 200, 200, 200, 200, 200};
    if (N < 1 || N > 8) throw InvalidArgument("oscillatory_constant: N must be in 1..8");
    if (d == 3) return c3[N];
    if (d == 4) return c4[N];
    throw UnsupportedDimension("oscillatory_constant: d must be 3 or 4");
}

double oscillatory_shape(int d, int N, double r, double r2, double D) {
    double h = 0.5 * (d - 1);
    double s = 0;
    for (int a : {1, -1})
        for (int b : {1, -1}) s += std::pow(1.0 + std::abs(r + a * r2 + b * D), -N);
    return std::pow(r * r2, h) * std::pow(1.0 + D + std::abs(r - r2), -h) * s;
}

PairBound pair_bound(const Space& space, int N, const Vec4& y, double r, const Vec4& y2, double r2) {
    check_space(space, 3, 4);
    if (!(r > 1 && r2 > 1)) throw InvalidArgument("pair_bound: radii must exceed 1");
    if (N < 1) throw InvalidArgument("pair_bound: N must be >= 1");
    PairBound b;
    b.N = N;
    double D = dist(y, y2);
    if (space.d == 3) b.crude = r * r2 / (1.0 + D + std::abs(r - r2));
    b.oscillatory = oscillatory_constant(space.d, N) * oscillatory_shape(space.d, N, r, r2, D);
    b.resonance_gaps = {std::abs(r + r2 + D), std::abs(r + r2 - D), std::abs(r - r2 + D), std::abs(r - r2 - D)};
    return b;
}

std::vector<PairSample> pair_corpus(int k, int count, std::uint64_t seed, double hw) {
    std::vector<PairSample> out;
    const double lo = std::ldexp(1.0, k), hi = 2 * lo;
    const double gap = 2 * hw;
    for (int i = 0; i < count; ++i) {
        CounterRng g(seed, static_cast<std::uint64_t>(k) * 1000003u + i);
        double r = g.uniform(lo, hi), r2 = r, D = 1;
        auto distinct_radius = [&] {
            do r2 = g.uniform(lo, hi);
            while (std::abs(r2 - r) < 1.0);
        };
        switch (i % 10) {
        case 0: case 1: case 2: case 3:  // internal near-tangency
            distinct_radius();
            do D = std::abs(r - r2) + g.uniform(-gap, gap);
            while (D < 1.0);
            break;
        case 4: case 5:  // external near-tangency
            if (i % 2) distinct_radius();
            D = r + r2 + g.uniform(-gap, gap);
            break;
        case 6: case 7:
            if (i % 2) distinct_radius();
            D = g.uniform(1.0, r + r2 + 1.0);
            break;
        case 8:
            if (i % 20 != 8) distinct_radius();
            D = 0;
            break;
        default:
            distinct_radius();
            if (i % 20 == 9 && std::abs(r - r2) - 2 * gap > 1.5)
                D = g.uniform(1.0, std::abs(r - r2) - 2 * gap);
            else
                D = r + r2 + 2 * gap + g.uniform(0.01, 5.0);
        }
        out.push_back({r, r2, D});
    }
    return out;
}

double fit_oscillatory_constant(const ResonantEvaluator& ev, int N, const std::vector<PairSample>& corpus) {
    double best = 0;
    for (const auto& s : corpus) {
        double v = std::abs(ev(s.r, s.r2, s.D));
        double b = oscillatory_shape(ev.profile().d, N, s.r, s.r2, s.D);
        if (b > 0) best = std::max(best, v / b);
    }
    return best;
}

}  // namespace kernel
}  // namespace wavesum
