#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wavesum/common.hpp"

namespace wavesum::kernel {

// Radial profile of the bump. The base bump is b(x) = (1 - |x|^2/R^2)^n with
// n = order + 20, psi0 = Laplacian^{order/2} b, psi = psi0 * psi0 and
// a(rho) = psi0_hat(rho)^2. psi0_hat is stored normalized to max |psi0_hat| = 1
// on a grid uniform in log(rho) and interpolated by a cubic B-spline.
struct KernelProfile {
    int d = 3;
    int order = 40;
    double support_radius = 0.1;
    double tol = 1e-8;
    int bump_exponent = 60;

    double rho_min = 0;    // first grid node
    double log_step = 0;   // grid spacing in log(rho)
    double log_scale = 0;  // natural log of the normalization factor
    double rho_peak = 0;   // argmax of a on the grid
    double rho_lo = 0;     // a < tol * max(a) below this
    double rho_max = 0;    // a < tol * max(a) beyond this
    std::vector<double> samples;  // normalized psi0_hat at rho_min * exp(i * log_step)

    double psi0_hat(double rho) const;
    double a(double rho) const;
    double grid_end() const { return rho_min * std::exp(log_step * double(samples.size() - 1)); }
    // Half-width of supp(sigma_r * psi) around the sphere |x - y| = r.
    double shell_halfwidth() const { return 2.0 * support_radius; }

    void build_interpolant();

private:
    std::shared_ptr<const void> spline_;
};

// Closed form of the normalized base-bump transform b_hat(rho)/b_hat(0).
double bump_transform_ratio(int d, int n, double support_radius, double rho);

KernelProfile make_bump(const Space& space, int order, double support_radius, double tol);
// Same as make_bump but never touches the cache directory.
KernelProfile build_profile(const Space& space, int order, double support_radius, double tol);

// Cache file I/O; directory from WAVESUM_CACHE_DIR when set.
std::string profile_cache_key(int d, int order, double support_radius, double tol);
void save_profile(const KernelProfile& p, const std::string& path);
std::optional<KernelProfile> load_profile(const std::string& path);

// B_d(s), normalized so that B_d(0) is the area of the unit sphere.
double surface_transform(int d, double s);
// r^{d-1} B_d(r rho): Fourier transform of surface measure on the sphere of radius r.
double surface_fourier(const Space& space, double r, double rho);

// B_d(x) = sum_{nu <= M} (c_nu^+ e^{ix} + c_nu^- e^{-ix}) x^{-nu-(d-1)/2} + remainder.
struct AsymptoticExpansion {
    int d = 3;
    int M = 0;
    std::vector<cplx> c_plus;
    std::vector<cplx> c_minus;
    double remainder_bound_constant = 0;
};

struct AsymptoticValue {
    double value;
    double error_bound;
};

AsymptoticExpansion make_expansion(int d, int M);
AsymptoticValue asymptotic_eval(const AsymptoticExpansion& e, double x);

struct QuadOptions {
    double rel_tol = 1e-8;
    int max_depth = 12;
    // Skip the disjoint-support shortcut and integrate anyway.
    bool force_quadrature = false;
};

// True when the two shells supp F_{y,r}, supp F_{y2,r2} cannot meet.
bool supports_disjoint(double r, double r2, double D, double halfwidth);

// <F_{y,r}, F_{y2,r2}> by adaptive Gauss-Legendre quadrature of the radial integral.
cplx scalar_product(const KernelProfile& profile, const Space& space, const Vec4& y, double r,
                    const Vec4& y2, double r2, const QuadOptions& opt = {});
double scalar_product_distance(const KernelProfile& profile, double r, double r2, double D,
                               const QuadOptions& opt = {});

// Fast evaluation of the same inner product: the product of three B_d factors is
// expanded in e^{+-i rho(r +- r2 +- D)}; only combinations with a small resonance
// gap survive integration against a^2, and those are integrated directly.
// Exact for d = 3; asymptotic with a truncation bound for d = 4, falling back
// to quadrature when an argument is too small for the expansion.
class ResonantEvaluator {
public:
    explicit ResonantEvaluator(const KernelProfile& profile, int terms = 6);
    double operator()(double r, double r2, double D) const;
    double operator()(const Vec4& y, double r, const Vec4& y2, double r2) const {
        return (*this)(r, r2, dist(y, y2));
    }
    double gap_window() const { return window_; }
    const KernelProfile& profile() const { return *profile_; }
    long fallbacks() const { return fallbacks_; }

private:
    double resonant_term(int s1, int s2, int s3, double r, double r2, double D, int nfac) const;
    const KernelProfile* profile_;
    AsymptoticExpansion exp_;
    double window_;
    double x_min_;
    std::vector<double> nodes_, wa2_;
    mutable std::atomic<long> fallbacks_{0};
};

struct PairBound {
    double crude = 0;
    double oscillatory = 0;
    std::array<double, 4> resonance_gaps{};
    int N = 1;
};

// Frozen fitted constant C_N for the oscillatory bound of the default profile.
double oscillatory_constant(int d, int N);
double oscillatory_shape(int d, int N, double r, double r2, double D);
PairBound pair_bound(const Space& space, int N, const Vec4& y, double r, const Vec4& y2, double r2);

struct PairSample {
    double r, r2, D;
};
// Deterministic pair corpus with r, r2 in [2^k, 2^{k+1}) mixing near-resonant,
// generic, concentric and disjoint placements.
std::vector<PairSample> pair_corpus(int k, int count, std::uint64_t seed, double halfwidth);
// max |<F,F'>| / oscillatory_shape over a corpus (the fitting step for C_N).
double fit_oscillatory_constant(const ResonantEvaluator& ev, int N, const std::vector<PairSample>& corpus);

}  // namespace wavesum::kernel
