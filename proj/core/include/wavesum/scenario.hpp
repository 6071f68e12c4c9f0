#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavesum/common.hpp"
#include "wavesum/density.hpp"
#include "wavesum/geometry.hpp"
#include "wavesum/harness.hpp"

namespace wavesum::scenario {

inline constexpr int kSchemaVersion = 1;

// kind: lattice | random-separated | adversarial-tangent | product-from-projections
struct GeneratorSpec {
    std::string kind = "lattice";
    int d = 3;
    std::vector<int> shape;          // lattice: points per axis
    double spacing = 1;              // lattice / adversarial line spacing
    std::vector<double> radii;       // radius set (R projection for product kinds)
    std::size_t count = 0;           // random-separated / adversarial-tangent: number of centres
    double extent = 0;               // random-separated: side of the sampling box
    double gap = 0.3;                // adversarial-tangent: offset from exact resonance
    bool product = true;             // random / adversarial: take the product extension
    std::string coeff = "unit";      // unit | random-phase
    std::vector<Vec4> ys;            // product-from-projections
};

// gamma1(y) = y_base^{(sum floor y_i) mod y_period}, gamma2(r) = r_base^{floor(r) mod r_period}
struct GammaSpec {
    double y_base = 2;
    int y_period = 1;
    double r_base = 2;
    int r_period = 1;
    density::Gamma1 gamma1() const;
    density::Gamma2 gamma2() const;
};

struct GeomSweep {
    std::vector<int> j;
    int l_offset = 10;    // l = ceil(j/2) + l_offset
    int angles = 9;
    long samples = 40000;
};

struct Scenario {
    int schema = kSchemaVersion;
    std::string name = "scenario";
    GeneratorSpec generator;
    std::vector<double> u{1};
    std::vector<int> k;         // empty: every nonempty slice
    std::vector<int> j{0};      // tensor level indices
    std::vector<int> m;         // cube scales for kest
    std::vector<std::string> verify;
    std::uint64_t seed = 1;
    long samples = 20000;
    double tol = 1e-8;
    double eps = 0.1;
    int threads = 1;
    int profile_order = 40;
    double support_radius = 0.1;
    GammaSpec gamma;
    GeomSweep geom;
    int dyad_instances = 50;
    int dyad_violated = 10;
    std::string out;
};

// Lemma ids accepted in Scenario::verify.
const std::vector<std::string>& known_lemmas();

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& s);

density::Configuration generate_config(const GeneratorSpec& spec, std::uint64_t seed);

std::string config_to_json(const density::Configuration& cfg);
density::Configuration config_from_json(const std::string& text);
void save_config(const density::Configuration& cfg, const std::string& path);
density::Configuration load_config(const std::string& path);

// min over sign choices of |r +- r2 +- |y - y2||
double resonance_gap(const density::WeightedPoint& a, const density::WeightedPoint& b);

// Angle-swept triples: A1 at the origin, A2 at distance ~2^l along e1, A3 at
// ~2.4 * 2^l on a ray at angle alpha from e1. The sweep straddles the angle at
// which the two latitude circles cut from A1 touch.
struct TripleSample {
    geometry::TripleConfig cfg;
    double angle = 0;
};
std::vector<TripleSample> adversarial_triples(int j, int l, int angles, std::uint64_t seed);
// Triples whose centres lie on one line (certified-zero family).
std::vector<TripleSample> coaxial_triples(int j, int l, int count);

// Random instance of the interpolation check. Valid instances satisfy the
// hypothesis with s_j taken as the smallest admissible value; violated ones
// shrink one s_j below it.
harness::InterpolationCheckInput interp_instance(std::uint64_t seed, int index, bool violated);

// K*(Q, s) against kest_bound over the cubes of the class E_k(u) at scale m,
// restricted to kest3_regime; one report per (cube, s) with the worst ratio kept per cube.
std::vector<harness::BoundReport> kest_reports(const density::Configuration& cfg, const density::DensityDecomposition& dd,
                                               double u, int m);

struct StageRecord {
    std::string name;
    std::string status;  // ok | failed | skipped
    double seconds = 0;
    std::string error;
};

struct RunResult {
    std::string dir;
    std::vector<harness::BoundReport> reports;
    std::vector<StageRecord> stages;
    bool ok = true;
};

// Generation -> decomposition -> gram -> verifications. Writes config.json,
// reports.csv, summary.json and manifest.json into `dir`.
RunResult run_experiment(const Scenario& s, const std::string& dir);

// format: csv | json | plotdata. Returns the written file path.
std::string emit_report(const std::string& dir, const std::string& format);

// The fixed CSV text for a report list (header plus one line per report).
std::string reports_csv(const std::vector<harness::BoundReport>& rs);
std::vector<harness::BoundReport> parse_reports_csv(const std::string& text);

}  // namespace wavesum::scenario
