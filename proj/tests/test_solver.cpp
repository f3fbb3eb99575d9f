/// @file test_solver.cpp
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stefan/errors.hpp"
#include "stefan/solver.hpp"

using namespace stefan;

namespace {

constexpr double pi = std::numbers::pi;

SolverConfig small_config() {
  SolverConfig c;
  c.n_x = 16;
  c.n_z = 33;
  c.dt = 1e-3;
  return c;
}

State sine_state(const SolverConfig& c, double amp) {
  const Grid g = c.grid();
  auto rho = InterfaceField::sample(g.x, [&](double x) { return amp * std::sin(x); });
  return make_state(compatible_temperature(rho, c.n_z), rho);
}

}  // namespace

TEST_CASE("configuration validation") {
  SolverConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  auto bad = [&](auto mutate) {
    SolverConfig d = small_config();
    mutate(d);
    CHECK_THROWS_AS(d.validate(), ConfigError);
  };
  bad([](SolverConfig& d) { d.dt = 0; });
  bad([](SolverConfig& d) { d.dt = -1e-3; });
  bad([](SolverConfig& d) { d.epsilon = -1; });
  bad([](SolverConfig& d) { d.theta = 0.4; });
  bad([](SolverConfig& d) { d.theta = 1.1; });
  bad([](SolverConfig& d) { d.k_diag = 4; });
  bad([](SolverConfig& d) { d.n_x = 15; });
  bad([](SolverConfig& d) { d.n_z = 32; });
  bad([](SolverConfig& d) { d.n_z = 5; });
  bad([](SolverConfig& d) { d.alpha = 0.5; });
  bad([](SolverConfig& d) { d.fp_max_iter = 0; });
  CHECK_THROWS_AS(Stepper(SolverConfig{.dt = 0.0}), ConfigError);
}

TEST_CASE("temperature_step on a flat interface matches the discrete eigenmode") {
  // u_old = cos x sin(pi |z| / 2) is a discrete eigenvector of the centred
  // Laplacian with u(0) = 0 and mirror ghosts at the walls.
  SolverConfig c = small_config();
  c.dt = 5e-3;
  const Grid g = c.grid();
  const double h = g.z.spacing();
  const auto u_old = BulkField::sample(g, [](double x, double z) { return std::cos(x) * std::sin(pi * std::abs(z) / 2); });
  const InterfaceField zero(c.n_x);
  const auto u = temperature_step(zero, zero, u_old, c);
  const double lam_h = (2.0 * std::cos(pi * h / 2) - 2.0) / (h * h);
  const double factor = 1.0 / (1.0 + c.dt * (1.0 - lam_h));
  CHECK((u - factor * u_old).max_abs() < 1e-13);
}

TEST_CASE("temperature_step keeps the Dirichlet trace at the curvature") {
  SolverConfig c = small_config();
  const Grid g = c.grid();
  const auto rho = InterfaceField::sample(g.x, [](double x) { return 0.05 * std::sin(x) + 0.02 * std::cos(2 * x); });
  const auto rho_t = InterfaceField::sample(g.x, [](double x) { return 0.1 * std::cos(x); });
  const auto u_old = compatible_temperature(rho, c.n_z);
  const auto u = temperature_step(rho, rho_t, u_old, c);
  CHECK((u.trace() - curvature(rho)).max_abs() < 1e-13);
  CHECK(u.finite());
}

TEST_CASE("interface_step examples") {
  SolverConfig c = small_config();
  c.dt = 0.1;
  const Grid g = c.grid();
  // u = |z| sin x has [u_z] = -2 sin x; flat rho_m, so the rate is -2 sin x.
  const auto u = BulkField::sample(g, [](double x, double z) { return std::abs(z) * std::sin(x); });
  const InterfaceField zero(c.n_x);
  SUBCASE("eps = 0") {
    const auto r = interface_step(zero, u, zero, c);
    for (int i = 0; i < c.n_x; ++i) CHECK(r[i] == doctest::Approx(-0.2 * std::sin(g.x.node(i))).epsilon(1e-12));
  }
  SUBCASE("eps = 1 halves a unit mode") {
    c.epsilon = 1.0;
    const auto r = interface_step(zero, u, zero, c);
    for (int i = 0; i < c.n_x; ++i) CHECK(r[i] == doctest::Approx(-0.1 * std::sin(g.x.node(i))).epsilon(1e-12));
  }
  SUBCASE("constant rate is not regularized") {
    c.epsilon = 1.0;
    const auto v = BulkField::sample(g, [](double, double z) { return -0.5 * std::abs(z); });
    const InterfaceField base(c.n_x, 0.3);
    const auto r = interface_step(base, v, base, c);
    for (int i = 0; i < c.n_x; ++i) CHECK(r[i] == doctest::Approx(0.3 + 0.1).epsilon(1e-13));
  }
}

TEST_CASE("flat state is a fixed point reached in one iteration") {
  SolverConfig c = small_config();
  const InterfaceField rho(c.n_x, 0.1);
  const State s = make_state(BulkField(c.n_x, c.n_z), rho);
  StepInfo info;
  const State n = fixed_point_step(s, c, &info);
  CHECK(info.iterations == 1);
  CHECK(n.u.max_abs() == 0.0);
  CHECK((n.rho - rho).max_abs() == 0.0);
  CHECK(n.t == doctest::Approx(c.dt));
}

TEST_CASE("coupled iteration contracts; Picard agrees when it converges") {
  SolverConfig c = small_config();
  c.dt = 1e-4;
  const State s = sine_state(c, 0.05);
  StepInfo ic, ip;
  const State a = fixed_point_step(s, c, &ic);
  CHECK(ic.max_ratio < 1.0);
  CHECK(ic.iterations <= 10);
  SolverConfig p = c;
  p.scheme = IterationScheme::picard;
  p.fp_max_iter = 200;
  const State b = fixed_point_step(s, p, &ip);
  CHECK((a.rho - b.rho).max_abs() < 1e-10);
  CHECK((a.u - b.u).max_abs() < 1e-9);
}

TEST_CASE("Picard iteration fails loudly when dt is too large") {
  SolverConfig c = small_config();
  c.n_x = 64;
  c.dt = 1.0;
  c.scheme = IterationScheme::picard;
  c.fp_max_iter = 20;
  const State s = sine_state(c, 0.05);
  CHECK_THROWS_AS(fixed_point_step(s, c), SolverError);
}

TEST_CASE("run: zero span, flat steady state, reports and sampling") {
  SolverConfig c = small_config();
  const State flat = make_state(BulkField(c.n_x, c.n_z), InterfaceField(c.n_x, 0.1));
  RunOptions o;
  o.t_end = 0.0;
  const RunResult r0 = run(flat, c, o);
  CHECK(r0.steps == 0);
  CHECK(r0.reports.size() == 1);

  o.t_end = 0.05;
  o.sample_every = 20;
  const RunResult r = run(flat, c, o);
  CHECK(r.steps == 50);
  CHECK(r.reports.size() == 51);
  CHECK(r.samples.size() == 4);  // t = 0, 0.02, 0.04, 0.05
  CHECK(r.final_state.t == doctest::Approx(0.05));
  CHECK(r.final_state.u.max_abs() == 0.0);
  CHECK((r.final_state.rho - flat.rho).max_abs() == 0.0);
  CHECK(r.rho_bar == doctest::Approx(0.1));
  for (const auto& rep : r.reports) {
    CHECK(rep.E == 0.0);
    CHECK(rep.cons_residual == 0.0);
  }
}

TEST_CASE("run keeps the trace consistent and the iteration contractive") {
  SolverConfig c = small_config();
  const State s = sine_state(c, 1e-2);
  RunOptions o;
  o.t_end = 0.05;
  const RunResult r = run(s, c, o);
  CHECK(r.max_trace_error < 1e-10);
  CHECK(r.max_contraction < 1.0);
  CHECK(r.max_cons_residual < 1e-10);
  // the identity residual is attached to every report with a full window
  CHECK_FALSE(r.reports.front().identity_residual.has_value());
  CHECK(r.reports[1].identity_residual.has_value());
  CHECK_FALSE(r.reports.back().identity_residual.has_value());
}

TEST_CASE("Crank-Nicolson runs and stays close to backward Euler") {
  SolverConfig c = small_config();
  const State s = sine_state(c, 1e-2);
  RunOptions o;
  o.t_end = 0.1;
  o.diagnostics = false;
  o.identity = false;
  const RunResult be = run(s, c, o);
  c.theta = 0.5;
  const RunResult cn = run(s, c, o);
  const double amp = be.final_state.rho.max_abs();
  CHECK((cn.final_state.rho - be.final_state.rho).max_abs() < 0.02 * amp);
}

TEST_CASE("compatible temperature is harmonic with the curvature trace") {
  const Grid g(16, 65);
  const auto rho = InterfaceField::sample(g.x, [](double x) { return 1e-3 * std::sin(2 * x); });
  const auto u = compatible_temperature(rho, 65);
  CHECK((u.trace() - curvature(rho)).max_abs() < 1e-14);
  // decays away from the interface like cosh(k (1 - |z|)) / cosh(k)
  const double ratio = std::abs(u(64, 2) / u(32, 2));
  CHECK(ratio == doctest::Approx(1.0 / std::cosh(2.0)).epsilon(1e-2));
}

TEST_CASE("step failures carry the step index") {
  SolverConfig c = small_config();
  c.n_x = 64;
  c.dt = 1.0;
  c.scheme = IterationScheme::picard;
  c.fp_max_iter = 5;
  const State s = sine_state(c, 0.05);
  RunOptions o;
  o.t_end = 2.0;
  try {
    run(s, c, o);
    FAIL("expected StepFailure");
  } catch (const StepFailure& e) {
    CHECK(e.step() == 1);
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}

TEST_CASE("halving retries rescue a step that fails at full size") {
  SolverConfig c = small_config();
  c.n_x = 32;
  c.dt = 0.005;
  c.scheme = IterationScheme::picard;
  c.fp_max_iter = 30;
  const State s = sine_state(c, 1e-3);
  CHECK_THROWS(fixed_point_step(s, c));
  c.dt_retries = 6;
  StepInfo info;
  const State n = fixed_point_step(s, c, &info);
  CHECK(info.halvings >= 1);
  CHECK(n.t == doctest::Approx(0.005));
  CHECK(info.trace_error < 1e-10);
}
