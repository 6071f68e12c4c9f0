#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wavesum/common.hpp"

namespace wavesum::density {

struct WeightedPoint {
    Vec4 y{};
    double r = 1;
    cplx c{1.0, 0.0};
};

struct Configuration {
    Space space;
    std::vector<WeightedPoint> points;
    bool is_product = false;
};

using Ids = std::vector<std::size_t>;

inline Vec5 lift(const WeightedPoint& p) { return {p.y[0], p.y[1], p.y[2], p.y[3], p.r}; }

// k with r in [2^k, 2^{k+1}).
int slice_index(double r);

// Checks the separation invariants (and product structure when flagged);
// throws SeparationError naming the offending pair.
void validate(const Configuration& cfg);
std::map<int, Ids> validate_and_slice(const Configuration& cfg);

struct BallWitness {
    Vec5 center{};
    double radius = 1;
    int count = 0;
};

enum class WitnessMode { canonical, exact };

struct DensityDecomposition {
    int k = 0;
    Ids slice;                        // ids into the configuration
    std::vector<int> nu;              // class exponent per slice member: member in E_k(2^nu)
    std::vector<BallWitness> witness;  // witness for the member's own class
    int max_nu() const;
    Ids hat(int nu) const;    // members of \hat E_k(2^nu)
    Ids cls(int nu) const;    // members of E_k(2^nu)
};

DensityDecomposition decompose_density(const Configuration& cfg, const Ids& slice, int k,
                                       WitnessMode mode = WitnessMode::canonical);
// Decomposition over explicit lifted points (used for derived sets).
DensityDecomposition decompose_points(const std::vector<Vec5>& pts, int k, WitnessMode mode);

struct ProductExtension {
    std::vector<Vec4> ys;
    std::vector<double> rs;
    std::vector<std::pair<std::size_t, std::size_t>> product;  // (index into ys, index into rs)
};
ProductExtension project_and_extend(const Configuration& cfg, const Ids& ids);

struct ProjectionCounts {
    std::size_t n_Y = 0;
    std::size_t n_R = 0;
};
ProjectionCounts projection_counts(const Configuration& cfg, const Ids& ids);

struct Cube {
    std::array<long long, 5> index{};
    Vec5 lo{};          // lower corner of Q
    Vec5 star_lo{}, star_hi{};  // Q* = [star_lo, star_hi)
    Ids members;        // covered points in Q
    Ids star_members;   // ambient points in Q*
    ProjectionCounts counts;  // of the ambient points in Q*
};

struct CubeCover {
    int m = 0;
    double side = 32;
    std::vector<Cube> cubes;
};

// Half-open origin-anchored dyadic cubes of side 2^{m+5} covering S; Q* is the
// concentric 2^5-dilate; counts taken over `ambient` (S itself when empty).
CubeCover cube_cover(const Configuration& cfg, const Ids& S, int m, const Ids& ambient = {});
bool in_box(const Vec5& p, const Vec5& lo, const Vec5& hi);

using Gamma1 = std::function<double(const Vec4&)>;
using Gamma2 = std::function<double(double)>;

struct Block {
    int b = 0;
    std::vector<std::size_t> y_idx;  // into TensorLevelStructure::ys
    std::vector<std::size_t> r_idx;  // into TensorLevelStructure::rs
};

struct TensorLevelStructure {
    int j = 0, k = 0;
    int block_halfwindow = 2;
    std::vector<Vec4> ys;      // Y projection
    std::vector<double> rs;    // R projection restricted to [2^k, 2^{k+1})
    std::vector<double> g1, g2;
    std::vector<std::pair<std::size_t, std::size_t>> level;     // E_k^{gamma,j}
    std::vector<std::pair<std::size_t, std::size_t>> widened;   // window [2^{j-5}, 2^{j+5}]
    std::vector<Block> blocks;
    std::vector<std::string> flags;

    double gamma(std::size_t iy, std::size_t ir) const { return g1[iy] * g2[ir]; }
    Configuration as_configuration(const std::vector<std::pair<std::size_t, std::size_t>>& set, int d) const;
};

// Level set count #E_k^{gamma,l} for the given projections.
std::size_t level_count(const TensorLevelStructure& t, int l);

TensorLevelStructure tensor_levels(const Configuration& cfg, const Gamma1& gamma1, const Gamma2& gamma2, int j, int k);

struct GroupAssignment {
    std::size_t cube = 0;
    int b = 0;
    int card_class = 0;
    int ratio_class = 0;
    std::size_t count = 0;
    ProjectionCounts counts;
};
std::vector<GroupAssignment> tensor_groups(const TensorLevelStructure& t, int m);

struct MuCell {
    double lo, hi;
    Ids members;
};
std::vector<MuCell> mu_split(const Configuration& cfg, const Ids& slice, int k, double u, double a_exp);

}  // namespace wavesum::density
