/// @file bench_kernels.cpp
/// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "stefan/hanzawa.hpp"
#include "stefan/kernels.hpp"

namespace {

using namespace stefan;
using kernels::Exec;

kernels::ModeProblem make_problem(int n_x, int n_z, bool coupled) {
  const int nm = n_x / 2 + 1;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  kernels::ModeProblem p;
  p.n_z = n_z;
  p.dz = 2.0 / (n_z - 1);
  p.mass = 1e3;
  p.theta = 1.0;
  p.a_ref.assign(n_z, 1.0);
  p.rhs = kernels::ModalField(nm, n_z);
  for (int j = 0; j < n_z; ++j)
    for (int k = 0; k < nm; ++k) p.rhs(j, k) = {U(rng), U(rng)};
  p.dirichlet.resize(nm);
  for (auto& d : p.dirichlet) d = {U(rng), U(rng)};
  p.coupled = coupled;
  if (coupled) {
    p.rho_pred.resize(nm);
    p.rho_gain.resize(nm);
    for (int k = 0; k < nm; ++k) {
      p.rho_pred[k] = {U(rng), U(rng)};
      p.rho_gain[k] = 1e-3;
    }
  }
  return p;
}

void BM_SolveModesReference(benchmark::State& st) {
  const auto p = make_problem(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), true);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::solve_modes_reference(p));
}

void BM_SolveModesSerial(benchmark::State& st) {
  const auto p = make_problem(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), true);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::solve_modes(p, Exec::serial));
}

void BM_SolveModesParallel(benchmark::State& st) {
  const auto p = make_problem(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), true);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::solve_modes(p, Exec::parallel));
}

struct OperatorCase {
  BulkField u;
  TransformCoefficients k;
};

OperatorCase make_operator_case(int n_x, int n_z) {
  const Grid g(n_x, n_z);
  const auto rho = InterfaceField::sample(g.x, [](double x) { return 0.1 * std::sin(x); });
  const auto rho_t = InterfaceField::sample(g.x, [](double x) { return 0.05 * std::cos(2 * x); });
  return {BulkField::sample(g, [](double x, double z) { return std::cos(x) * std::cos(3.0 * z); }),
          coefficients(rho, rho_t, Cutoff(), g.z)};
}

void BM_ApplyOperator(benchmark::State& st, Exec exec) {
  const auto c = make_operator_case(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::apply_operator(c.u, c.k.a, c.k.b, c.k.c, true, exec));
}

void BM_ForwardRows(benchmark::State& st, Exec exec) {
  const auto c = make_operator_case(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::forward_rows(c.u, exec));
}

}  // namespace

BENCHMARK(BM_SolveModesReference)->Args({32, 65})->Args({64, 129})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveModesSerial)->Args({64, 129})->Args({256, 513})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SolveModesParallel)->Args({64, 129})->Args({256, 513})->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_ApplyOperator, serial, Exec::serial)->Args({64, 129})->Args({256, 513});
BENCHMARK_CAPTURE(BM_ApplyOperator, parallel, Exec::parallel)->Args({64, 129})->Args({256, 513});
BENCHMARK_CAPTURE(BM_ForwardRows, serial, Exec::serial)->Args({256, 513});
BENCHMARK_CAPTURE(BM_ForwardRows, parallel, Exec::parallel)->Args({256, 513});

BENCHMARK_MAIN();
