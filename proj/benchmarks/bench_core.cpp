#include <benchmark/benchmark.h>

#include "davg/algorithms.hpp"
#include "davg/bounds.hpp"
#include "davg/gossip.hpp"
#include "davg/observation.hpp"

using namespace davg;

static void BM_Eigendecomposition(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto wm = metropolis_hastings(build_cycle(n));
  const Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n) - wm.w;
  for (auto _ : state) {
    benchmark::DoNotOptimize(symmetric_eigendecomposition(l));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_Eigendecomposition)->Arg(32)->Arg(64)->Arg(128)->Arg(256)
    ->Unit(benchmark::kMillisecond)->Complexity();

static void BM_MetropolisHastings(benchmark::State& state) {
  const auto topology = build_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(metropolis_hastings(topology));
  }
}
BENCHMARK(BM_MetropolisHastings)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_SdaIteration(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto gossip = gossip_from_weights(metropolis_hastings(build_star(n)));
  const auto inst = uniform_means_instance(n, 1, 1.0, 1.0, 1);
  const int t_total = 256;
  const auto params = theorem1_params(gossip, t_total);
  SdaOptions opt;
  opt.trace.enabled = false;
  std::uint64_t rep = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_sda(gossip, inst.model, params, rep++, opt));
  }
  state.SetItemsProcessed(state.iterations() * t_total * n);
}
BENCHMARK(BM_SdaIteration)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_KStar(benchmark::State& state) {
  const double kappa = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_k_star(kappa));
  }
}
BENCHMARK(BM_KStar)->Arg(100)->Arg(10000);

BENCHMARK_MAIN();
