// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "gbo/constants.hpp"
#include "gbo/fourier.hpp"
#include "gbo/ground_state.hpp"
#include "gbo/pde.hpp"
#include "gbo/reduced_dynamics.hpp"

namespace {

using namespace gbo;

void BM_FracDispersion(benchmark::State& state) {
  const Grid1D grid(static_cast<std::size_t>(state.range(0)), 400.0);
  RealField f(grid);
  for (std::size_t i = 0; i < grid.n_points(); ++i) f[i] = 2.0 / (1.0 + grid.point(i) * grid.point(i));
  for (auto _ : state) benchmark::DoNotOptimize(frac_dispersion(f));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FracDispersion)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

void BM_Petviashvili(benchmark::State& state) {
  const Grid1D grid(static_cast<std::size_t>(state.range(0)), 400.0);
  for (auto _ : state) benchmark::DoNotOptimize(petviashvili_solve(2.5, grid));
}
BENCHMARK(BM_Petviashvili)->Arg(4096)->Arg(16384)->Unit(benchmark::kMillisecond);

// One IF-RK4 step of a two-soliton state.
void BM_PdeStep(benchmark::State& state) {
  const GroundState gs = petviashvili_solve(2.5, Grid1D(static_cast<std::size_t>(state.range(0)), 100.0));
  SimConfig cfg;
  cfg.grid = gs.grid();
  cfg.p = 2.5;
  cfg.frame = Frame::kComoving;
  const RealField u0 = make_multisoliton(gs, {6.0, -6.0}, {0.25, -0.25}, {1, -1}, false);
  Stepper stepper(cfg, u0);
  SimState s{0.0, u0};
  for (auto _ : state) {
    s = stepper.step(s);
    benchmark::DoNotOptimize(s.u[0]);
  }
}
BENCHMARK(BM_PdeStep)->Arg(4096)->Arg(16384)->Unit(benchmark::kMicrosecond);

void BM_ReducedOde(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const InteractionConstants c = interaction_constants(4.0, n, 0.7147, 2.0, 1.0);
  const AlphaSolution alpha = solve_alpha(c);
  const ParamState seed = asymptotic_seed(alpha.alpha, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(seed, c.a, 1e6));
}
BENCHMARK(BM_ReducedOde)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
