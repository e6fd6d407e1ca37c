#include "wachlab/apspec.hpp"
#include "wachlab/classifier.hpp"
#include "wachlab/modp.hpp"
#include "wachlab/series.hpp"
#include "wachlab/wach.hpp"

#include <benchmark/benchmark.h>

using namespace wachlab;

static void BM_SeriesMultiply(benchmark::State& state) {
    const long mx = state.range(0);
    auto ring = EisensteinRing::unramified(7, 200);
    Series a = phi_of_x(ring, mx);
    Series b = q_series(ring, 2, mx);
    for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_SeriesMultiply)->Arg(32)->Arg(64)->Arg(128);

static void BM_GammaAct(benchmark::State& state) {
    auto ring = EisensteinRing::unramified(11, 100);
    Series f = q_series(ring, 1, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(gamma_act(f, 2));
}
BENCHMARK(BM_GammaAct)->Arg(40)->Arg(80);

static void BM_WachContext(benchmark::State& state) {
    const long p = state.range(0);
    auto ring = EisensteinRing::unramified(p, 16);
    WachParams prm = WachParams::defaults(OLElem(ring, p), 2 * p - 1);
    for (auto _ : state) benchmark::DoNotOptimize(WachContext(prm));
}
BENCHMARK(BM_WachContext)->Arg(5)->Arg(7)->Arg(11)->Unit(benchmark::kMillisecond);

static void BM_BuildWachShared(benchmark::State& state) {
    const long p = state.range(0);
    auto ring = EisensteinRing::unramified(p, 16);
    WachParams prm = WachParams::defaults(OLElem(ring, p), 2 * p - 1);
    WachContext ctx(prm);
    long c = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_wach(ctx, OLElem(ring, c * p)));
        c = c % (p - 1) + 1;
    }
}
BENCHMARK(BM_BuildWachShared)->Arg(5)->Arg(7)->Arg(11)->Unit(benchmark::kMillisecond);

static void BM_ModpPipeline(benchmark::State& state) {
    const long p = state.range(0);
    auto ring = EisensteinRing::unramified(p, 16);
    WachData d = build_wach(WachParams::defaults(OLElem(ring, p), p + 3));
    for (auto _ : state) benchmark::DoNotOptimize(run_modp_pipeline(d));
}
BENCHMARK(BM_ModpPipeline)->Arg(5)->Arg(7)->Arg(11)->Unit(benchmark::kMillisecond);

static void BM_Classify(benchmark::State& state) {
    auto ring = parse_eisenstein(13, "");
    OLElem ap = parse_ap(ring, "5*p");
    for (auto _ : state) benchmark::DoNotOptimize(classify(13, 20, ap));
}
BENCHMARK(BM_Classify);
BENCHMARK_MAIN();
