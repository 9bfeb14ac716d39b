// Copyright 2026 The uatraj Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "uatraj/belief.hpp"
#include "uatraj/optimizer.hpp"
#include "uatraj/sim_harness.hpp"

namespace {

using namespace uatraj;

Scenario scenario(int horizon) {
  SamplingBounds bounds;
  bounds.horizon = horizon;
  Rng rng = make_rng(11, 0, 0);
  return sample_scenario(rng, bounds);
}

void BM_Propagate(benchmark::State& state) {
  const Scenario sc = scenario(static_cast<int>(state.range(0)));
  const Trajectory traj = make_baseline(sc);
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate(traj, sc.cameras, sc.noise,
                                       AblationMask::full(), sc.prior,
                                       sc.propagation));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Propagate)->RangeMultiplier(2)->Range(5, 80)->Complexity();

void BM_LossAndGradient(benchmark::State& state) {
  const Scenario sc = scenario(static_cast<int>(state.range(0)));
  const Trajectory traj = make_baseline(sc);
  const PlanningProblem problem = sc.problem();
  std::vector<Vector6d> grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_gradient(traj, problem, grad));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LossAndGradient)->RangeMultiplier(2)->Range(5, 80)->Complexity();

void BM_FiniteDifferenceGradient(benchmark::State& state) {
  const Scenario sc = scenario(static_cast<int>(state.range(0)));
  const Trajectory traj = make_baseline(sc);
  const PlanningProblem problem = sc.problem();
  for (auto _ : state) {
    benchmark::DoNotOptimize(gradient(traj, problem, GradientMode::kFiniteDifference));
  }
}
BENCHMARK(BM_FiniteDifferenceGradient)->Arg(10)->Arg(20);

void BM_Optimize(benchmark::State& state) {
  const Scenario sc = scenario(20);
  const Trajectory traj = make_baseline(sc);
  const PlanningProblem problem = sc.problem();
  OptimizerConfig opt;
  opt.max_iterations = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize(traj, problem, opt));
  }
}
BENCHMARK(BM_Optimize)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_NoisyRollout(benchmark::State& state) {
  const Scenario sc = scenario(20);
  const Trajectory traj = make_baseline(sc);
  Rng rng = make_rng(5, 0, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rollout_noisy(traj, sc, rng));
  }
}
BENCHMARK(BM_NoisyRollout);

}  // namespace

BENCHMARK_MAIN();
