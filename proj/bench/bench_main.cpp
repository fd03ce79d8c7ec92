// Serial vs OpenMP restarts of the satisficing solver, and serial vs
// parallel closed-loop sweeps.  Arg(0) is the serial reference path.

#include <benchmark/benchmark.h>

#include "nilcontrol/closed_loop.hpp"

using namespace nilcontrol;

namespace {

void BM_SolveSP(benchmark::State& state) {
  const ModelSpec m = rigid_body_model();
  SPInstance inst;
  inst.x = Eigen::VectorXd(6);
  inst.x << -0.1, 0, 0.2, 0, 0, 0.1;
  inst.C_bound = 5.0;  // tight bound so every restart runs
  SolverConfig cfg;
  cfg.parallel = state.range(0) != 0;
  cfg.restarts = 8;
  cfg.max_evals = 600;
  cfg.stage1_evals = 300;
  for (auto _ : state) benchmark::DoNotOptimize(solve_sp(m, inst, cfg));
}
BENCHMARK(BM_SolveSP)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  std::vector<SimulationConfig> configs;
  for (int i = 0; i < 8; ++i) {
    SimulationConfig c;
    c.model = "chained_drift";
    c.x0 = {0.1 + 0.01 * i, -0.1, 0.2 - 0.02 * i};
    c.periods = 4;
    c.seed = i + 1;
    configs.push_back(c);
  }
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(configs, parallel));
}
BENCHMARK(BM_Sweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
