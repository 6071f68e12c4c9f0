#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wavesum/geometry.hpp"
#include "wavesum/harness.hpp"
#include "wavesum/kernel.hpp"
#include "wavesum/scenario.hpp"

using namespace wavesum;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::string scenario_path;
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    long samples = 0;
    double tol = 0;
    int threads = 0;
};

void add_common(CLI::App* app, Common& c, bool with_config) {
    app->add_option("--scenario", c.scenario_path, "scenario file (JSON, schema 1)");
    if (with_config) app->add_option("--config", c.config_path, "configuration file written by generate");
    app->add_option("--seed", c.seed, "override the scenario seed");
    app->add_option("--out", c.out, "output path");
    app->add_option("--samples", c.samples, "override Monte Carlo sample count");
    app->add_option("--tol", c.tol, "override kernel profile tolerance");
    app->add_option("--threads", c.threads, "threads for gram assembly");
}

scenario::Scenario load(const Common& c) {
    scenario::Scenario s;
    if (!c.scenario_path.empty()) s = scenario::load_scenario(c.scenario_path);
    if (c.seed) s.seed = c.seed;
    if (c.samples) s.samples = c.samples;
    if (c.tol > 0) s.tol = c.tol;
    if (c.threads > 0) s.threads = c.threads;
    return s;
}

density::Configuration config_for(const Common& c, const scenario::Scenario& s) {
    if (!c.config_path.empty()) return scenario::load_config(c.config_path);
    if (c.scenario_path.empty()) throw InvalidArgument("need --scenario or --config");
    return scenario::generate_config(s.generator, s.seed);
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + out);
    f << text << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavesum: wave-packet sum experiments"};
    app.require_subcommand(1);
    Common c;

    auto* gen = app.add_subcommand("generate", "write the scenario's configuration");
    add_common(gen, c, false);
    gen->callback([&] {
        auto s = load(c);
        emit(c.out, scenario::config_to_json(scenario::generate_config(s.generator, s.seed)));
    });

    auto* dec = app.add_subcommand("decompose", "density classes per slice");
    add_common(dec, c, true);
    dec->callback([&] {
        auto s = load(c);
        auto cfg = config_for(c, s);
        nlohmann::ordered_json j;
        for (const auto& [k, ids] : density::validate_and_slice(cfg)) {
            auto dd = density::decompose_density(cfg, ids, k);
            nlohmann::ordered_json row;
            for (int nu = 0; nu <= dd.max_nu(); ++nu) row[std::to_string(1 << nu)] = dd.cls(nu).size();
            j[std::to_string(k)] = row;
        }
        emit(c.out, j.dump(2));
    });

    bool quad = false;
    auto* gr = app.add_subcommand("gram", "assemble the gram matrix and the wave-sum norm");
    add_common(gr, c, true);
    gr->add_flag("--quadrature", quad, "adaptive quadrature instead of the resonant evaluator");
    gr->callback([&] {
        auto s = load(c);
        auto cfg = config_for(c, s);
        auto prof = kernel::make_bump(cfg.space, s.profile_order, s.support_radius, s.tol);
        kernel::ResonantEvaluator ev(prof);
        density::Ids all(cfg.points.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        harness::GramOptions go;
        go.quadrature = quad;
        go.threads = s.threads;
        auto g = harness::gram(cfg, ev, all, go);
        std::vector<cplx> coeffs;
        for (const auto& p : cfg.points) coeffs.push_back(p.c);
        bool clamped = false;
        double n2 = harness::l2_norm_sq(g, coeffs, &clamped);
        nlohmann::ordered_json j{{"size", g.size()},
                                 {"evaluated_pairs", g.evaluated_pairs()},
                                 {"l2_norm_sq", n2},
                                 {"clamped", clamped},
                                 {"fallbacks", ev.fallbacks()}};
        emit(c.out, j.dump(2));
    });

    int gj = 22, loff = 10, angles = 9;
    std::string method = "localized";
    auto* geo = app.add_subcommand("geom", "angle-swept triple intersection volumes");
    add_common(geo, c, false);
    geo->add_option("--j", gj, "scale exponent j (t = 2^j)");
    geo->add_option("--l-offset", loff, "l = ceil(j/2) + offset");
    geo->add_option("--angles", angles, "number of angles in the sweep");
    geo->add_option("--method", method, "mc | grid | localized");
    geo->callback([&] {
        auto s = load(c);
        int l = (gj + 1) / 2 + loff;
        geometry::VolumeOptions vo;
        vo.samples = c.samples ? c.samples : s.geom.samples;
        vo.seed = s.seed;
        if (method == "mc") vo.method = geometry::VolumeMethod::mc;
        else if (method == "grid") vo.method = geometry::VolumeMethod::grid;
        else if (method != "localized") throw InvalidArgument("unknown method " + method);
        auto gb = geometry::geom_bound(Space{3}, gj, l);
        std::ostringstream os;
        os << "j\tl\tangle\tmethod\tsamples\tseed\tvalue\tstderr\tbound\tratio\n";
        char buf[256];
        for (const auto& ts : scenario::adversarial_triples(gj, l, angles, s.seed)) {
            auto e = geometry::triple_volume(ts.cfg, vo);
            std::snprintf(buf, sizeof buf, "%d\t%d\t%.17g\t%s\t%ld\t%llu\t%.17g\t%.17g\t%.17g\t%.17g", gj, l, ts.angle,
                          geometry::method_name(e.method), e.samples, static_cast<unsigned long long>(e.seed), e.value,
                          e.standard_error, gb.bound, e.value / gb.bound);
            os << buf << "\n";
        }
        emit(c.out, os.str());
    });

    auto* ver = app.add_subcommand("verify", "run a scenario and write its run directory");
    add_common(ver, c, false);
    int rc = 0;
    ver->callback([&] {
        auto s = load(c);
        std::string dir = !c.out.empty() ? c.out : (!s.out.empty() ? s.out : "runs/" + s.name);
        auto r = scenario::run_experiment(s, dir);
        for (const auto& st : r.stages)
            std::fprintf(stderr, "%-16s %-8s %8.2fs %s\n", st.name.c_str(), st.status.c_str(), st.seconds, st.error.c_str());
        std::cout << dir << "\n";
        if (!r.ok) rc = 1;
    });

    int nseeds = 3;
    auto* sw = app.add_subcommand("sweep", "run a scenario over consecutive seeds");
    add_common(sw, c, false);
    sw->add_option("--seeds", nseeds, "number of seeds starting at the scenario seed");
    sw->callback([&] {
        auto s = load(c);
        std::string base = !c.out.empty() ? c.out : "runs/" + s.name + "-sweep";
        const std::uint64_t first = s.seed;
        for (int i = 0; i < nseeds; ++i) {
            s.seed = first + i;
            std::string dir = (fs::path(base) / ("seed-" + std::to_string(s.seed))).string();
            auto r = scenario::run_experiment(s, dir);
            std::cout << dir << (r.ok ? "" : " FAILED") << "\n";
            if (!r.ok) rc = 1;
        }
    });

    std::string format = "csv";
    auto* rep = app.add_subcommand("report", "emit csv | json | plotdata from a run directory");
    rep->add_option("--out", c.out, "run directory")->required();
    rep->add_option("--format", format, "csv | json | plotdata");
    rep->callback([&] { std::cout << scenario::emit_report(c.out, format) << "\n"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return rc;
}
