#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wavesum/common.hpp"
#include "wavesum/density.hpp"

namespace wavesum::tangency {

// Points y' != y0 with t <= |y' - y0| <= t + 3.
std::size_t shell_count(const std::vector<Vec4>& points, const Vec4& y0, double t);

struct TangencyProfile {
    int m = 0;
    long t_max = 0;           // t-grid is 0..t_max (step 1); K vanishes beyond the last stored t
    std::vector<int> s_grid;  // s = 0, 1, ... while 2^s <= 2 * n_ambient
    // K[si][t] for t = 0..stored_t
    std::vector<std::vector<std::size_t>> K;
    std::vector<std::size_t> K_star;  // max over t, per s
    std::size_t n_dense = 0, n_ambient = 0;
    std::size_t at(std::size_t si, long t) const {
        return t < static_cast<long>(K[si].size()) ? K[si][t] : 0;
    }
};

// K(Q,s,t): number of dense y with at least 2^s ambient y' in the shell at t.
// Both sets are Y-projections already restricted to Q*.
TangencyProfile k_profile(const std::vector<Vec4>& dense, const std::vector<Vec4>& ambient, int m);

// d = 3: max(u 2^m n^{5/3} 2^{-2s}, u 2^{m/2} n 2^{-s});
// d = 4: max(u 2^{4m/3} n^{5/3} 2^{-2s}, u 2^{m/2} n 2^{-s}).
double kest_bound(const Space& space, double u, int m, double n_Y, int s);
// The four-dimensional form is only claimed for s > m + 100.
inline bool kest4_regime(int s, int m) { return s > m + 100; }
// Regime in which the three-dimensional form is tested: 2^s >= u 2^{m/2}.
inline bool kest3_regime(int s, int m, double u) { return std::ldexp(1.0, s) >= u * std::exp2(0.5 * m); }

struct InteractionSum {
    double lhs = 0;
    std::vector<std::pair<std::string, double>> rhs_variants;
    std::string constraint;
    std::size_t pairs = 0;
    double rhs(const std::string& name) const;
    double min_rhs() const;
};

using GramEntry = std::function<double(std::size_t, std::size_t)>;

// Sum of |<F, F'>| over unordered pairs of `ids` whose lifted distance lies in
// [2^m, 2^{m+1}], with the rand3 / rand4 majorants (constants set to 1).
// n_total = #(E_k n Q*), n_R = N_{R,Q}.
InteractionSum comparable_sum(const density::Configuration& cfg, const density::Ids& ids, const GramEntry& entry,
                              int k, int m, double u, std::size_t n_total, std::size_t n_R);

// Sum of |<F, F'>| over ids_k x ids_kp with the i1 / i2 majorants.
// n_total = #(E_k n Q*), n_R_kp = N_{R,Q,k'}.
InteractionSum cross_slice_sum(const density::Ids& ids_k, const density::Ids& ids_kp, const GramEntry& entry, int k, double u,
                               std::size_t n_total, std::size_t n_R_kp);

// (1 + m) log2(2 + u): stand-in for the "m log u" factor, which vanishes at u = 1.
double log_factor(int m, double u);

struct RandcorTerms {
    double I = 0;
    double II = 0;
};
// level_counts: l -> #(E_k^{gamma,l} n Q*); only l >= j contribute.
RandcorTerms randcor_terms(double u, int m, int k, double eps, int j, const std::map<int, std::size_t>& level_counts);

}  // namespace wavesum::tangency
