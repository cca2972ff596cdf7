// Microbenchmarks for the hot paths: analytic solvers, fuzzy inference,
// network steps, and the event-driven simulator.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "caclab/blocking.hpp"
#include "caclab/policies.hpp"
#include "caclab/random.hpp"
#include "caclab/rrbfn.hpp"
#include "caclab/simulator.hpp"
#include "caclab/traffic.hpp"

namespace {

using namespace caclab;

void BM_SolveRecurrence(benchmark::State& state) {
  int capacity = int(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_recurrence(capacity, 0.7));
  }
}
BENCHMARK(BM_SolveRecurrence)->Arg(50)->Arg(200);

void BM_MultirateExact(benchmark::State& state) {
  Scenario sc = build_utilization_scenario(0.7, int(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(multirate_exact(sc.capacity, sc.classes));
  }
}
BENCHMARK(BM_MultirateExact)->Arg(50)->Arg(200);

void BM_ErlangB(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(erlang_b(int(state.range(0)), 0.8 * state.range(0)));
  }
}
BENCHMARK(BM_ErlangB)->Arg(50)->Arg(500);

void BM_FuzzyInfer(benchmark::State& state) {
  FuzzySystem sys = default_fuzzy_system();
  double u = 0.0;
  for (auto _ : state) {
    u += 0.001;
    if (u > 1.0) u = 0.0;
    benchmark::DoNotOptimize(fuzzy_infer(sys, u, 3));
  }
}
BENCHMARK(BM_FuzzyInfer);

void BM_RrbfnStep(benchmark::State& state) {
  RrbfnConfig cfg =
      state.range(0) == 0 ? desk_scale_config() : full_scale_config();
  RrbfnModel model = init_model(cfg, 1);
  std::vector<double> input(std::size_t(cfg.input_size), 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rrbfn_step(model, input));
  }
}
BENCHMARK(BM_RrbfnStep)->Arg(0)->Arg(1);

void BM_TrainEpoch(benchmark::State& state) {
  RrbfnModel model = init_model(RrbfnConfig{8, {24, 16}, 1.0}, 1);
  RandomStream rng(5);
  TrainingSet data;
  for (int s = 0; s < 64; ++s) {
    TrainingSample sample;
    for (int t = 0; t < 8; ++t) {
      std::vector<double> x(8);
      for (double& v : x) v = rng.uniform(0.0, 1.0);
      sample.inputs.push_back(x);
    }
    sample.target = rng.uniform(0.0, 1.0);
    data.samples.push_back(sample);
  }
  for (auto _ : state) {
    RrbfnModel fresh = model;
    benchmark::DoNotOptimize(train_gradient_descent(fresh, data, 1, 0.1));
  }
}
BENCHMARK(BM_TrainEpoch);

void BM_SimulateConventional(benchmark::State& state) {
  Scenario sc = build_utilization_scenario(0.7, 50);
  SimConfig cfg;
  cfg.total_arrivals = state.range(0);
  cfg.warmup_arrivals = state.range(0) / 10;
  cfg.seed = 7;
  for (auto _ : state) {
    ConventionalPolicy policy;
    benchmark::DoNotOptimize(run(sc, policy, cfg));
  }
}
BENCHMARK(BM_SimulateConventional)->Arg(5000)->Arg(50000);

void BM_SimulateFuzzy(benchmark::State& state) {
  Scenario sc = build_utilization_scenario(0.7, 50);
  SimConfig cfg;
  cfg.total_arrivals = state.range(0);
  cfg.warmup_arrivals = state.range(0) / 10;
  cfg.seed = 7;
  for (auto _ : state) {
    FuzzyPolicy policy;
    benchmark::DoNotOptimize(run(sc, policy, cfg));
  }
}
BENCHMARK(BM_SimulateFuzzy)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
