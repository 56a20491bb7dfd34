// Copyright 2026 The lzs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <vector>

#include "benchmark/benchmark.h"

#include "lzs/experiments.hpp"
#include "lzs/propagator.hpp"
#include "lzs/transfer_matrix.hpp"

namespace {

lzs::DriveParameters fig3a(int n_periods) {
  lzs::DriveParameters p;
  p.delta_mhz = 5.57;
  p.epsilon_m_mhz = 100.0;
  p.period_ns = 128.0;
  p.n_periods = n_periods;
  return p;
}

void BM_evolve_fig3a_8us(benchmark::State& state) {
  const auto p = fig3a(63);
  lzs::IntegratorConfig cfg;
  cfg.method = static_cast<lzs::IntegratorMethod>(state.range(0));
  for (auto _ : state) {
    auto traj = lzs::evolve(p, cfg, lzs::QubitState::zero(), {0.0, 8000.0}, 2.0);
    benchmark::DoNotOptimize(traj.populations.back());
  }
}
BENCHMARK(BM_evolve_fig3a_8us)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_single_period_rotation(benchmark::State& state) {
  const auto p = fig3a(1);
  for (auto _ : state) benchmark::DoNotOptimize(lzs::single_period_rotation(p).rotation_angle);
}
BENCHMARK(BM_single_period_rotation);

void BM_stroboscopic_evolve(benchmark::State& state) {
  const auto p = fig3a(1);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto traj = lzs::stroboscopic_evolve(p, n, lzs::QubitState::zero());
    benchmark::DoNotOptimize(traj.populations.back());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_stroboscopic_evolve)->Arg(100)->Arg(10000);

void BM_resonance_scan(benchmark::State& state) {
  std::vector<double> grid;
  for (int i = 0; i < 10000; ++i) grid.push_back(120.0 + 40.0 * i / 9999.0);
  const auto base = fig3a(1);
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto scan = lzs::resonance_scan(base, lzs::ScanParameter::kPeriod, grid, workers);
    benchmark::DoNotOptimize(scan.back().rotation_angle);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}
BENCHMARK(BM_resonance_scan)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_dephased_ensemble(benchmark::State& state) {
  const auto p = fig3a(8);
  lzs::DephasingConfig noise;
  noise.t2_star_us = 6.56;
  noise.n_samples = static_cast<int>(state.range(0));
  noise.workers = 4;
  for (auto _ : state) {
    auto traj = lzs::evolve_ensemble_dephased(p, {}, noise, lzs::QubitState::zero(), {0.0, 1024.0}, 4.0);
    benchmark::DoNotOptimize(traj.populations.back());
  }
}
BENCHMARK(BM_dephased_ensemble)->Arg(200)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
