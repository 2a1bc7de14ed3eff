#include <benchmark/benchmark.h>

#include "strategem/cluster.hpp"
#include "strategem/costmodel.hpp"
#include "strategem/planner.hpp"
#include "strategem/simulator.hpp"
#include "strategem/workload.hpp"

using namespace strategem;

namespace {

void BM_AllreduceTime(benchmark::State& state) {
  const Cluster cluster = uniform_cluster(8, 32, 15, 25, 5);
  double payload = 1e8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(allreduce_time(payload, 8, cluster));
    payload += 1.0;
  }
}
BENCHMARK(BM_AllreduceTime);

void BM_CostTableResnet(benchmark::State& state) {
  const ModelGraph graph = resnet50_like(32, 100);
  const Cluster cluster = uniform_cluster(8, 32, 15, 25, 5);
  const TrainingSchedule sched;
  const CostParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_cost_table(graph, cluster, sched, params));
  }
}
BENCHMARK(BM_CostTableResnet);

void BM_SolveDpResnet(benchmark::State& state) {
  const ModelGraph graph = resnet50_like(32, 100);
  const Cluster cluster = uniform_cluster(8, 32, 15, 25, 5);
  const TrainingSchedule sched;
  const CostParams params;
  const int buckets = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dp(graph, cluster, sched, params, buckets));
  }
}
BENCHMARK(BM_SolveDpResnet)->Arg(256)->Arg(4096);

void BM_SolveExactSmall(benchmark::State& state) {
  WorkloadSpec spec;
  spec.name = "bench";
  for (int i = 0; i < 8; ++i) {
    ComponentSpec c;
    c.flops_fwd = 1e9 * (i + 1);
    c.param_count = 100000 * (i + 1);
    c.activation_bytes_per_sample = 10000;
    spec.components.push_back(c);
  }
  const ModelGraph graph = build_chain(spec);
  const Cluster cluster = uniform_cluster(8, 32, 15, 25, 5);
  const TrainingSchedule sched;
  const CostParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_exact(graph, cluster, sched, params));
  }
}
BENCHMARK(BM_SolveExactSmall);

void BM_SimulateEpoch(benchmark::State& state) {
  const ModelGraph graph = resnet50_like(32, 100);
  const Cluster cluster = uniform_cluster(8, 32, 15, 25, 5);
  TrainingSchedule sched;
  sched.dataset_size = 12800;
  sched.global_batch = 128;
  sched.epochs = 1;
  DriftModel drift;
  drift.sigma_noise = 0.0;
  const CostParams params;
  SimParams sim;
  sim.profile_cost_s = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run(graph, cluster, sched, Mode::Adaptive, drift, {}, params, sim, 42, false));
  }
}
BENCHMARK(BM_SimulateEpoch);

}  // namespace

BENCHMARK_MAIN();
