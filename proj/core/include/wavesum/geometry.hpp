#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "wavesum/common.hpp"

namespace wavesum::geometry {

// {x : t <= |x - center| <= t + w}
struct AnnulusSpec {
    Vec4 center{};
    double t = 1;
    double w = 1;
};

bool contains(const AnnulusSpec& a, const Vec4& x);
double annulus_volume(int d, const AnnulusSpec& a);

struct TripleConfig {
    Space space{3};
    std::array<AnnulusSpec, 3> annuli;
    int j = 0;
    int l = 0;
    double distance(int a, int b) const { return dist(annuli[a].center, annuli[b].center); }
};

// Precondition flags; empty when every condition holds.
std::vector<std::string> triple_preconditions(const TripleConfig& cfg);

enum class VolumeMethod { mc, grid, localized };
const char* method_name(VolumeMethod m);

struct VolumeOptions {
    VolumeMethod method = VolumeMethod::localized;
    long samples = 100000;
    std::uint64_t seed = 1;
    double grid_step = 0.25;
    int grid_shifts = 4;
    // Throw FeasibilityError on failed preconditions instead of only flagging them.
    bool strict = false;
};

struct VolumeEstimate {
    double value = 0;
    double standard_error = 0;
    VolumeMethod method = VolumeMethod::mc;
    long samples = 0;
    std::uint64_t seed = 0;
    bool certified_zero = false;
    std::string certificate;
    std::vector<std::string> flags;
};

struct DisjointnessCertificate {
    bool disjoint = false;
    // Intervals of the l_{1,2} coordinate <x - x1, e12> for A1 n A2 and for A1 n A3.
    double band12_lo = 0, band12_hi = 0;
    double band13_lo = 0, band13_hi = 0;
    std::string describe() const;
};

// Slab argument: A1 n A2 sits in a slab orthogonal to l_{1,2}; A1 n A3 sits in a
// band around l_{1,3} whose projection onto l_{1,2} is bounded by its box.
DisjointnessCertificate slab_certificate(const TripleConfig& cfg);

VolumeEstimate triple_volume(const TripleConfig& cfg, const VolumeOptions& opt = {});

struct GeomBound {
    double bound = 0;
    bool applicable = false;
};
// threshold_offset is 10 for the standalone bound and 20 where tangency counting uses it.
GeomBound geom_bound(const Space& space, int j, int l, int threshold_offset = 10);

struct ArcReport {
    bool degenerate = false;  // concentric: the overlap is the whole annulus
    double arc_center_angle = 0;  // angle of the upper intersection arc, measured from c2 - c1
    double arc_length_bound = 0;  // C * R / dist
    double constant = 4;
    bool contained = false;
    long samples = 0;
    long hits = 0;
    double max_excess = 0;  // largest distance from a hit to the arc pair, minus the allowed 10
};

// Planar annuli of equal inner radius R and thickness 1 with dist <= R/5.
ArcReport pair_arc_2d(const AnnulusSpec& a1, const AnnulusSpec& a2, long samples = 200000,
                      std::uint64_t seed = 1, double constant = 4);

// Slice of a 4-D annulus by the hyperplane x_4 = center_4 + offset. Inner radius 0
// means the slice is a solid ball.
std::optional<AnnulusSpec> slice_4d(const AnnulusSpec& a, double offset);

}  // namespace wavesum::geometry
