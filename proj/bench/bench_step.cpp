#include <benchmark/benchmark.h>

#include "meshless/cloud.hpp"
#include "meshless/model.hpp"
#include "meshless/scheme.hpp"
#include "meshless/state.hpp"
#include "meshless/stencil.hpp"

using namespace meshless;

namespace {

NodeCloud bench_cloud(benchmark::State& st) {
    return generate_jittered(static_cast<int>(st.range(0)), 1.0, 2, 0.3, 5);
}

const StarConfig kStar{8, StarCriterion::distance, {}};

ModelParams bench_params() {
    ModelParams p;
    p.chi = 1.0;
    p.tech_diffusion = 0.1;
    p.g.kind = GrowthKind::gaussian;
    p.g.level = 0.1;
    p.g.center = {0.5, 0.5};
    p.g.sigma = 0.2;
    return p;
}

State bench_state(const NodeCloud& cloud) {
    State s = uniform_state(cloud.size(), 1.0, 1.0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        s.k[i] = 5.0 + cloud.positions[i].x;
        s.A[i] = 1.0 + 0.5 * cloud.positions[i].y;
    }
    return s;
}

void BM_StencilsParallel(benchmark::State& st) {
    const NodeCloud cloud = bench_cloud(st);
    for (auto _ : st) benchmark::DoNotOptimize(build_all_stencils(cloud, kStar));
}

void BM_StencilsSerial(benchmark::State& st) {
    const NodeCloud cloud = bench_cloud(st);
    for (auto _ : st) benchmark::DoNotOptimize(build_all_stencils_reference(cloud, kStar));
}

void BM_StepParallel(benchmark::State& st) {
    const NodeCloud cloud = bench_cloud(st);
    const StencilTable table = build_all_stencils(cloud, kStar);
    const ModelParams params = bench_params();
    const SchemeContext ctx(cloud, table, params);
    const State s = bench_state(cloud);
    for (auto _ : st) benchmark::DoNotOptimize(step(ctx, s, 1e-6));
}

void BM_StepSerial(benchmark::State& st) {
    const NodeCloud cloud = bench_cloud(st);
    const StencilTable table = build_all_stencils(cloud, kStar);
    const ModelParams params = bench_params();
    const SchemeContext ctx(cloud, table, params);
    const State s = bench_state(cloud);
    for (auto _ : st) benchmark::DoNotOptimize(step_reference(ctx, s, 1e-6));
}

}  // namespace

BENCHMARK(BM_StencilsParallel)->Arg(20)->Arg(40);
BENCHMARK(BM_StencilsSerial)->Arg(20)->Arg(40);
BENCHMARK(BM_StepParallel)->Arg(20)->Arg(40);
BENCHMARK(BM_StepSerial)->Arg(20)->Arg(40);

BENCHMARK_MAIN();
