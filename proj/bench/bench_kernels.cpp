// Serial reference vs OpenMP for the trial kernel and the grid oracle.
//   CVSENSE_THREADS=4 ./bench_kernels

#include <benchmark/benchmark.h>

#include "cvsense/execution.hpp"
#include "cvsense/grid_search.hpp"
#include "cvsense/monte_carlo.hpp"
#include "cvsense/protocols.hpp"

using namespace cvsense;

namespace {

void BM_TrialKernel(benchmark::State& state, Execution exec) {
    const int m = static_cast<int>(state.range(0));
    const GaussianState received =
        displace_all(apply_loss(build_entangled_input(m, m), LossChannel::uniform(m, 0.9)), 0.1);
    const HomodyneSampler sampler(received, Quadrature::x);
    const LinearEstimatorKernel kernel{sampler, Vector::Constant(m, 1.0 / m), 0.0, 0.1};
    const std::int64_t trials = 1 << 18;
    for (auto _ : state) benchmark::DoNotOptimize(kernel.run(trials, 1, exec));
    state.SetItemsProcessed(state.iterations() * trials);
    state.counters["threads"] = exec == Execution::parallel ? max_threads() : 1;
}

void BM_JointGrid(benchmark::State& state) {
    GridOptions opts;
    opts.points = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(grid_joint_product_two_node({1.0, 0.5}, 10.0, opts));
    state.counters["threads"] = max_threads();
}

}  // namespace

BENCHMARK_CAPTURE(BM_TrialKernel, serial, Execution::serial)->Arg(4)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_TrialKernel, parallel, Execution::parallel)->Arg(4)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_JointGrid)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    configure_threads_from_env();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
