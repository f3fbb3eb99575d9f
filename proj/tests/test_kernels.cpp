/// @file test_kernels.cpp
#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stefan/hanzawa.hpp"
#include "stefan/kernels.hpp"

using namespace stefan;
using kernels::Exec;

namespace {

kernels::ModeProblem random_problem(int n_x, int n_z, bool coupled, unsigned seed) {
  const int nm = n_x / 2 + 1;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  kernels::ModeProblem p;
  p.n_z = n_z;
  p.dz = 2.0 / (n_z - 1);
  p.mass = 250.0;
  p.theta = 0.75;
  p.a_ref.resize(n_z);
  for (auto& a : p.a_ref) a = 1.0 + 0.3 * (U(rng) + 1.0);
  p.rhs = kernels::ModalField(nm, n_z);
  for (int j = 0; j < n_z; ++j)
    for (int k = 0; k < nm; ++k) p.rhs(j, k) = {U(rng), k == 0 || k == nm - 1 ? 0.0 : U(rng)};
  p.dirichlet.resize(nm);
  for (auto& d : p.dirichlet) d = {U(rng), U(rng)};
  p.coupled = coupled;
  if (coupled) {
    p.rho_pred.resize(nm);
    p.rho_gain.resize(nm);
    for (int k = 0; k < nm; ++k) {
      p.rho_pred[k] = {U(rng), U(rng)};
      p.rho_gain[k] = 2e-3 / (1.0 + 1e-2 * k * k * k * k);
    }
  }
  return p;
}

double max_diff(const kernels::ModeSolution& a, const kernels::ModeSolution& b) {
  double m = 0.0;
  for (int j = 0; j < a.u.n_z(); ++j)
    for (int k = 0; k < a.u.modes(); ++k) m = std::max(m, std::abs(a.u(j, k) - b.u(j, k)));
  for (std::size_t k = 0; k < a.rho.size(); ++k) m = std::max(m, std::abs(a.rho[k] - b.rho[k]));
  return m;
}

}  // namespace

TEST_CASE("fast mode solver matches the dense reference") {
  for (bool coupled : {false, true}) {
    CAPTURE(coupled);
    const auto p = random_problem(16, 33, coupled, 3 + coupled);
    const auto ref = kernels::solve_modes_reference(p);
    const auto fast = kernels::solve_modes(p, Exec::serial);
    CHECK(max_diff(fast, ref) <= 1e-12);
    CHECK(fast.rho.size() == (coupled ? 9u : 0u));
  }
}

TEST_CASE("Dirichlet solve reproduces the prescribed value at z = 0") {
  const auto p = random_problem(16, 33, false, 5);
  const auto s = kernels::solve_modes(p);
  const int c = (p.n_z - 1) / 2;
  for (int k = 0; k < s.u.modes(); ++k) CHECK(std::abs(s.u(c, k) - p.dirichlet[k]) < 1e-14);
}

TEST_CASE("coupled solve satisfies its interface relations") {
  const auto p = random_problem(16, 33, true, 9);
  const auto s = kernels::solve_modes(p);
  const int c = (p.n_z - 1) / 2;
  const double h = p.dz;
  for (int k = 0; k < s.u.modes(); ++k) {
    CHECK(std::abs(s.u(c, k) - (p.dirichlet[k] - double(k * k) * s.rho[k])) < 1e-12);
    // one-sided second-order jump u_z(0-) - u_z(0+)
    const cplx up = (-3.0 * s.u(c, k) + 4.0 * s.u(c + 1, k) - s.u(c + 2, k)) / (2 * h);
    const cplx dn = (3.0 * s.u(c, k) - 4.0 * s.u(c - 1, k) + s.u(c - 2, k)) / (2 * h);
    CHECK(std::abs(s.rho[k] - (p.rho_pred[k] + p.rho_gain[k] * (dn - up))) < 1e-11);
  }
}

TEST_CASE("serial and parallel kernels agree, independent of thread count") {
  const auto p = random_problem(64, 129, true, 21);
  const auto serial = kernels::solve_modes(p, Exec::serial);
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    CHECK(max_diff(kernels::solve_modes(p, Exec::parallel), serial) <= 1e-12);
  }

  const Grid g(64, 129);
  const auto rho = InterfaceField::sample(g.x, [](double x) { return 0.1 * std::sin(x); });
  const auto rho_t = InterfaceField::sample(g.x, [](double x) { return 0.02 * std::cos(3 * x); });
  const auto k = coefficients(rho, rho_t, Cutoff(), g.z);
  const auto u = BulkField::sample(g, [](double x, double z) { return std::sin(2 * x) * std::cos(z) + z; });
  const auto ref = kernels::apply_operator(u, k.a, k.b, k.c, true, Exec::serial);
  const auto mref = kernels::forward_rows(u, Exec::serial);
  for (int threads : {1, 3, 4}) {
    omp_set_num_threads(threads);
    CHECK((kernels::apply_operator(u, k.a, k.b, k.c, true, Exec::parallel) - ref).max_abs() <= 1e-12);
    const auto m = kernels::forward_rows(u, Exec::parallel);
    double d = 0.0;
    for (int j = 0; j < g.n_z(); ++j)
      for (int q = 0; q < m.modes(); ++q) d = std::max(d, std::abs(m(j, q) - mref(j, q)));
    CHECK(d == 0.0);
  }
  omp_set_num_threads(saved);
  CHECK((kernels::inverse_rows(mref, 64) - u).max_abs() < 1e-13);
}

TEST_CASE("apply_operator approximates the transformed operator at second order") {
  auto err_at = [](int nz) {
    const Grid g(32, nz);
    const auto rho = InterfaceField::sample(g.x, [](double x) { return 0.15 * std::sin(x); });
    const auto rho_t = InterfaceField::sample(g.x, [](double x) { return 0.05 * std::cos(x); });
    const auto k = coefficients(rho, rho_t, Cutoff(), g.z);
    const double pi = std::numbers::pi;
    // Neumann-compatible smooth field.
    const auto u = BulkField::sample(g, [&](double x, double z) { return std::cos(x) * std::cos(pi * z); });
    const auto Lu = kernels::apply_operator(u, k.a, k.b, k.c);
    double e = 0.0;
    for (int j = 0; j < nz; ++j) {
      if (j == g.z.center()) {
        for (int i = 0; i < 32; ++i) CHECK(Lu(j, i) == 0.0);
        continue;
      }
      const double z = g.z.node(j);
      for (int i = 0; i < 32; ++i) {
        const double x = g.x.node(i);
        const double uxx = -std::cos(x) * std::cos(pi * z);
        const double uzz = -pi * pi * std::cos(x) * std::cos(pi * z);
        const double uz = -pi * std::cos(x) * std::sin(pi * z);
        const double uxz = pi * std::sin(x) * std::sin(pi * z);
        const double exact = uxx + k.a(j, i) * uzz - k.b(j, i) * uxz - k.c(j, i) * uz;
        e = std::max(e, std::abs(Lu(j, i) - exact));
      }
    }
    return e;
  };
  const double e1 = err_at(33), e2 = err_at(65);
  CHECK(std::log2(e1 / e2) > 1.9);
}
