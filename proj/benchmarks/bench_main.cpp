// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <memory>

#include <benchmark/benchmark.h>

#include "fracpme/discretization.hpp"
#include "fracpme/fem.hpp"
#include "fracpme/mesh.hpp"
#include "fracpme/spectral.hpp"
#include "fracpme/stepper.hpp"

using namespace fracpme;

namespace {

Mesh unit_mesh(int n) { return build_structured_rect_mesh({0, 1, 0, 1}, n, n); }

Vector bump(const Mesh& mesh) {
  return interpolate([](const Point& p) { return 1.0 + 0.5 * std::cos(3 * p.x()) * std::sin(2 * p.y()); }, mesh)
      .values();
}

void BM_AssembleStiffness(benchmark::State& state) {
  const Mesh mesh = unit_mesh(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(mesh));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(mesh.num_vertices()));
}
BENCHMARK(BM_AssembleStiffness)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_Eigensolve(benchmark::State& state) {
  const Mesh mesh = unit_mesh(static_cast<int>(state.range(0)));
  const SparseMatrix K = assemble_stiffness(mesh);
  const SparseMatrix M = assemble_consistent_mass(mesh);
  for (auto _ : state) benchmark::DoNotOptimize(compute_eigendecomposition(K, M));
}
BENCHMARK(BM_Eigensolve)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_FractionalPoisson(benchmark::State& state) {
  auto disc = Discretization::build(unit_mesh(static_cast<int>(state.range(0))));
  const Vector rho = bump(disc->mesh);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_fractional_poisson(disc->spectral, disc->fem.consistent_mass, rho, 0.5));
  }
}
BENCHMARK(BM_FractionalPoisson)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_ImplicitStep(benchmark::State& state) {
  auto disc = Discretization::build(unit_mesh(static_cast<int>(state.range(0))));
  SolverConfig cfg;
  cfg.dt = 1e-2;
  cfg.cutoff = CutoffParams(1e-3, 10.0);
  const Stepper stepper(disc, cfg);
  const Vector rho = bump(disc->mesh);
  int iters = 0;
  for (auto _ : state) {
    const StepResult r = stepper.step(rho);
    iters = r.iters;
    benchmark::DoNotOptimize(r.rho.data());
  }
  state.counters["picard_iters"] = iters;
}
BENCHMARK(BM_ImplicitStep)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
