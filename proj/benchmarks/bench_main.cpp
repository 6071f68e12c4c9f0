#include <benchmark/benchmark.h>

#include "wavesum/density.hpp"
#include "wavesum/geometry.hpp"
#include "wavesum/harness.hpp"
#include "wavesum/kernel.hpp"

using namespace wavesum;

namespace {

const kernel::KernelProfile& profile() {
    static const auto p = kernel::make_bump(Space{3}, 40, 0.1, 1e-8);
    return p;
}

density::Configuration lattice(int n) {
    density::Configuration c;
    c.space = Space{3};
    c.is_product = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (double r : {8.0, 9.0, 16.0, 17.0}) c.points.push_back({{double(i), double(j), double(k), 0}, r, {1, 0}});
    return c;
}

density::Ids all_ids(const density::Configuration& c) {
    density::Ids ids(c.points.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    return ids;
}

void BM_ResonantEntry(benchmark::State& st) {
    kernel::ResonantEvaluator ev(profile());
    double D = 0.5;
    for (auto _ : st) {
        benchmark::DoNotOptimize(ev(16, 17, D));
        D = D < 30 ? D + 0.37 : 0.5;
    }
}
BENCHMARK(BM_ResonantEntry);

void BM_QuadratureEntry(benchmark::State& st) {
    double D = 0.5;
    for (auto _ : st) {
        benchmark::DoNotOptimize(kernel::scalar_product_distance(profile(), 16, 17, D));
        D = D < 30 ? D + 0.37 : 0.5;
    }
}
BENCHMARK(BM_QuadratureEntry);

void BM_Gram(benchmark::State& st) {
    auto cfg = lattice(static_cast<int>(st.range(0)));
    kernel::ResonantEvaluator ev(profile());
    auto ids = all_ids(cfg);
    for (auto _ : st) benchmark::DoNotOptimize(harness::gram(cfg, ev, ids).entries.data());
    st.SetComplexityN(static_cast<long>(ids.size()));
}
BENCHMARK(BM_Gram)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& st) {
    auto cfg = lattice(static_cast<int>(st.range(0)));
    auto slices = density::validate_and_slice(cfg);
    const auto& [k, ids] = *slices.rbegin();
    for (auto _ : st) benchmark::DoNotOptimize(density::decompose_density(cfg, ids, k).max_nu());
}
BENCHMARK(BM_Decompose)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_TripleVolume(benchmark::State& st) {
    geometry::TripleConfig c;
    c.j = 12;
    c.l = 9;
    for (auto& a : c.annuli) {
        a.t = 4096;
        a.w = 4;
    }
    c.annuli[1].center = {600, 0, 0, 0};
    c.annuli[2].center = {300, 520, 0, 0};
    geometry::VolumeOptions o;
    o.samples = st.range(0);
    for (auto _ : st) benchmark::DoNotOptimize(geometry::triple_volume(c, o).value);
}
BENCHMARK(BM_TripleVolume)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
