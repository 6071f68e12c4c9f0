#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wavesum/common.hpp"
#include "wavesum/density.hpp"
#include "wavesum/kernel.hpp"

namespace wavesum::harness {

using density::Configuration;
using density::Ids;

struct GramOptions {
    bool quadrature = false;  // adaptive quadrature per entry instead of the resonant route
    kernel::QuadOptions quad;
    int threads = 1;
};

// Dense real symmetric matrix over `ids`; mask marks entries that were evaluated
// (0 means the supports were certified disjoint).
struct GramMatrix {
    Ids ids;
    std::vector<double> entries;
    std::vector<unsigned char> mask;
    std::size_t size() const { return ids.size(); }
    double operator()(std::size_t a, std::size_t b) const { return entries[a * ids.size() + b]; }
    // Lookup by configuration id; NaN when absent.
    double by_id(std::size_t ia, std::size_t ib) const;
    std::size_t evaluated_pairs() const;
    std::map<std::size_t, std::size_t> position;  // configuration id -> row
};

GramMatrix gram(const Configuration& cfg, const kernel::ResonantEvaluator& ev, const Ids& ids,
                const GramOptions& opt = {});

// Sum_{a,b} c_a conj(c_b) G_ab. Negative round-off down to -10 * tol * trace is
// clamped to 0 (clamped is set); anything below throws.
double l2_norm_sq(const GramMatrix& g, const std::vector<cplx>& coeffs, bool* clamped = nullptr,
                  double tol = 1e-8);
// Sum_{a in A, b in B} c_a conj(c_b) G_ab; A and B index into g.
cplx cross_inner(const GramMatrix& g, const std::vector<std::size_t>& A, const std::vector<std::size_t>& B,
                 const std::vector<cplx>& coeffs);

struct SupportEstimate {
    double value = 0;
    double standard_error = 0;
    double sum_of_volumes = 0;
    long samples = 0;
    std::uint64_t seed = 0;
};

double shell_volume(int d, double r, double halfwidth);
// Karp-Luby estimate of the volume of the union of shells ||x - y| - r| <= halfwidth.
SupportEstimate support_measure(const Configuration& cfg, const Ids& ids, double halfwidth, long samples,
                                std::uint64_t seed);

struct BoundReport {
    std::string lemma;
    int d = 3;
    std::optional<int> k, m, j;
    std::optional<double> u, eps, a_exp;
    double lhs = 0;
    double rhs = 0;
    double ratio = 0;
    std::vector<std::string> flags;
    std::uint64_t seed = 0;
    std::string corpus;
    bool flagged(const std::string& f) const;
};

void finalize_ratio(BoundReport& r);
std::string csv_header();
std::string csv_row(const BoundReport& r);
std::string reports_json(const std::vector<BoundReport>& rs, const std::string& run);

// Class E_k(u) of a decomposition, as configuration ids.
Ids density_class(const density::DensityDecomposition& dd, double u);

struct SupportOptions {
    long samples = 20000;
    std::uint64_t seed = 1;
    double halfwidth = 0.2;
};

BoundReport verify_support(const Configuration& cfg, const density::DensityDecomposition& dd, double u,
                           const SupportOptions& opt = {});

struct TensorSelection {
    int j = 0;
    int k = 0;
    double u = 1;
    Ids ids;                   // ids into the configuration built by `config`
    Configuration config;      // points of the widened set with gamma as coefficient
    std::size_t level_count = 0;  // #E_k^{gamma,j}
    std::map<int, std::size_t> level_counts;  // l -> #E_k^{gamma,l}
    std::vector<std::string> flags;
};

// Points of tilde E_k^{gamma,j}(u) n E_k^{gamma,j} with coefficient gamma.
TensorSelection tensor_selection(const Configuration& cfg, const density::Gamma1& g1, const density::Gamma2& g2,
                                 int j, int k, double u, density::WitnessMode mode = density::WitnessMode::canonical);

BoundReport verify_support_tensor(const Configuration& cfg, const density::Gamma1& g1, const density::Gamma2& g2,
                                  int j, int k, double u, const SupportOptions& opt = {});

struct L2Result {
    BoundReport main;
    BoundReport comparable;  // sum_k ||G_{u,k}||^2
    BoundReport cross;       // sum over k > k' > N(u) of |<G_{u,k'}, G_{u,k}>|
    BoundReport slice_split;       // lhs <= N(u) (comparable + cross)
    BoundReport slice_split_tight; // lhs <= K (comparable + cross) with K the number of nonempty slices
};

double split_threshold(double u, double eps);  // N(u) = 100 eps^{-1} log2(2 + u)

// d = 3 product configuration; exponent a_exp (11/13 by default) plus eps.
L2Result verify_l2(const Configuration& cfg, const kernel::ResonantEvaluator& ev, double u, double eps = 0.1,
                   double a_exp = 11.0 / 13.0, density::WitnessMode mode = density::WitnessMode::canonical);

BoundReport verify_l2_tensor(const Configuration& cfg, const kernel::ResonantEvaluator& ev,
                             const density::Gamma1& g1, const density::Gamma2& g2, int j, double u,
                             double eps = 0.1, double a_exp = 11.0 / 18.0);

struct InterpolationCheckInput {
    std::vector<double> weights;            // atom masses
    std::vector<int> scales;                // j for each F_j
    std::vector<std::vector<double>> F;     // F[i][atom]
    std::vector<double> s;                  // s_j
    double p0 = 1, p1 = 2, p = 1.5;
    double M = 1;
};

// True when the level-set hypothesis holds for both exponents; relative slack 1e-12.
bool interpolation_hypothesis(const InterpolationCheckInput& in);
BoundReport dyadic_interp_check(const InterpolationCheckInput& in, double C);

// Radial profile s -> (sigma_r * psi)(s) of one wave packet, zero outside the shell.
class RadialProfile {
public:
    RadialProfile(const kernel::KernelProfile& profile, double r, int nodes = 1200);
    double operator()(double s) const;
    double radius() const { return r_; }
    double halfwidth() const { return hw_; }

private:
    double r_, hw_, lo_, hi_;
    std::shared_ptr<const void> spline_;
};

struct GridSpec {
    double step = 0.05;
    double pad = 1.0;
    double max_points = 2e8;
};

// Grid quadrature of the p-th power integral of |sum c F| over the padded bounding box of the shells.
double direct_lp_norm(const Configuration& cfg, const Ids& ids, const std::vector<cplx>& coeffs, double p,
                      const kernel::KernelProfile& profile, const GridSpec& grid = {});

struct RowSup {
    double sup = 0;
    double rho_at_sup = 0;
    double ratio = 0;  // sup / r^{(d-1)/2}
};
RowSup row_transform_sup(const Space& space, double r, const kernel::KernelProfile& profile);

}  // namespace wavesum::harness
