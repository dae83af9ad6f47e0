// Microbenchmarks for the hot paths: transforms, velocity, nonlinear term, one step.

#include <benchmark/benchmark.h>

#include <cmath>

#include "dpm/blowup1d.hpp"
#include "dpm/random_field.hpp"
#include "dpm/solver.hpp"
#include "dpm/velocity.hpp"

using namespace dpm;

namespace {

SpectralField sample_field(int dim, int n) {
  auto t = random_smooth_field(Domain::cube(dim, n), 1.0, 6.0, 3);
  normalize_l2(t, 1.0);
  return t;
}

void BM_ForwardTransform(benchmark::State& st) {
  const auto u = inverse_transform(sample_field(static_cast<int>(st.range(0)), static_cast<int>(st.range(1))));
  for (auto _ : st) benchmark::DoNotOptimize(forward_transform(u));
}
BENCHMARK(BM_ForwardTransform)->Args({2, 64})->Args({2, 256})->Args({3, 32});

void BM_InverseTransform(benchmark::State& st) {
  const auto u = sample_field(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(inverse_transform(u));
}
BENCHMARK(BM_InverseTransform)->Args({2, 64})->Args({2, 256})->Args({3, 32});

void BM_Velocity(benchmark::State& st) {
  const auto t = sample_field(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(velocity_from_temperature(t));
}
BENCHMARK(BM_Velocity)->Args({2, 64})->Args({3, 32});

void BM_NonlinearTerm(benchmark::State& st) {
  const auto t = sample_field(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(nonlinear_term(t));
}
BENCHMARK(BM_NonlinearTerm)->Args({2, 64})->Args({2, 256})->Args({3, 32});

void BM_SupNorm(benchmark::State& st) {
  const auto t = sample_field(2, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(sup_norm(t));
}
BENCHMARK(BM_SupNorm)->Arg(64);

void BM_Step(benchmark::State& st) {
  SolverParams p;
  p.nu = 0.1;
  p.alpha = 1.5;
  p.dt = 1e-3;
  p.t_end = 1.0;
  p.scheme = static_cast<Scheme>(st.range(1));
  const DpmStepper stepper(p, Forcing{});
  SimulationState s{0.0, sample_field(2, static_cast<int>(st.range(0)))};
  for (auto _ : st) {
    s = stepper.step(s, p.dt);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Step)
    ->Args({64, static_cast<int>(Scheme::IFRK4)})
    ->Args({64, static_cast<int>(Scheme::IFEuler)})
    ->Args({256, static_cast<int>(Scheme::IFRK4)});

void BM_StreamSlopeStep(benchmark::State& st) {
  const Domain d(1, {static_cast<int>(st.range(0))});
  blowup::StreamSlopeState s{0.0, PhysicalField::from_function(d, [](const Point& x) { return std::cos(x[0]); }), 0.0};
  blowup::Regularization reg;
  reg.mode = blowup::Mode::Quasilinear;
  reg.nu = 0.1;
  for (auto _ : st) {
    auto next = blowup::step(s, reg, 1e-5);
    benchmark::DoNotOptimize(next);
  }
}
BENCHMARK(BM_StreamSlopeStep)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
