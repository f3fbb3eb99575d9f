/// @file test_energy.cpp
/// Reference values come from tests/oracles/frozen_values.py (adaptive
/// quadrature of the closed-form integrands).
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "stefan/config.hpp"
#include "stefan/energy.hpp"
#include "stefan/errors.hpp"

using namespace stefan;

namespace {

constexpr double pi = std::numbers::pi;

InterfaceField sine(int n, double amp, int k = 1) {
  return InterfaceField::sample(TangentialGrid(n), [&](double x) { return amp * std::sin(k * x); });
}

}  // namespace

TEST_CASE("frozen k = 0 energies of a sine interface") {
  const int n = 64;
  const BulkField zero(n, 17);
  // The bulk weight needs a non-degenerate transform; a steep cutoff keeps
  // 1 + phi' rho > 0 at delta = 0.5.
  for (auto [delta, ref] : {std::pair{0.1, 6.259769559033646e-02}, std::pair{0.5, 1.443034655751612e+00}}) {
    const auto rho = sine(n, delta);
    const StaticEnergy e = energy_k0(zero, rho, rho, 0.0, Cutoff(0.02));
    CHECK(e.E == doctest::Approx(ref).epsilon(1e-12));
    CHECK(e.E_eps == e.E);
  }
  const auto rho = sine(n, 0.2);
  const StaticEnergy e0 = energy_k0(zero, rho, rho, 0.0, Cutoff());
  const StaticEnergy e1 = energy_k0(zero, rho, rho, 1.0, Cutoff());
  CHECK(e1.E_eps - e0.E == doctest::Approx(2.476490838156025e-01).epsilon(1e-11));
  const StaticEnergy e2 = energy_k0(zero, rho, rho, 0.5, Cutoff());
  CHECK(e2.E_eps - e0.E == doctest::Approx(0.5 * 2.476490838156025e-01).epsilon(1e-11));
}

TEST_CASE("frozen dissipation for a linearly growing amplitude") {
  // rho = (0.2 + 0.3 (t - t_now)) sin x at three levels; u = 0.
  const int n = 64;
  std::vector<Snapshot> h;
  for (int l = 0; l < 3; ++l) {
    const double t = 0.01 * l;
    h.push_back({t, BulkField(n, 17), sine(n, 0.2 + 0.3 * (t - 0.02))});
  }
  const DerivativeStack st(h, 1);
  const auto D = dissipation_D(st, h.back().rho, 0, Cutoff());
  CHECK(D.complete());
  CHECK(D.value == doctest::Approx(5.572104385851054e-01).epsilon(1e-11));
}

TEST_CASE("derivative pairs") {
  using P = std::pair<int, int>;
  CHECK(derivative_pairs(0) == std::vector<P>{{0, 0}});
  CHECK(derivative_pairs(1) == std::vector<P>{{0, 0}, {1, 0}, {2, 0}, {0, 1}});
  const auto p3 = derivative_pairs(3);
  CHECK(p3.size() == 16);
  for (auto [mu, s] : p3) CHECK(mu + 2 * s <= 6);
}

TEST_CASE("DerivativeStack: backward, forward and unavailable quotients") {
  const int n = 16;
  std::vector<Snapshot> h;
  for (int l = 0; l < 4; ++l) {
    const double t = 0.1 * l;
    h.push_back({t, BulkField(n, 9, t * t), InterfaceField(n, 3.0 * t)});
  }
  SUBCASE("newest entry uses backward quotients") {
    const DerivativeStack st(h, 2);
    CHECK(st.t() == doctest::Approx(0.3));
    CHECK(st.available(2));
    CHECK_FALSE(st.forward(1));
    CHECK(st.rho(1)[0] == doctest::Approx(3.0));
    CHECK(st.u(2)(0, 0) == doctest::Approx(2.0));
  }
  SUBCASE("oldest entry shifts forward") {
    const DerivativeStack st(h, 0, 2);
    CHECK(st.available(1));
    CHECK(st.forward(1));
    CHECK(st.u(1)(3, 3) == doctest::Approx(0.1));
  }
  SUBCASE("orders beyond the history are unavailable") {
    const std::vector<Snapshot> one(h.begin(), h.begin() + 1);
    const DerivativeStack st(one, 2);
    CHECK(st.available(0));
    CHECK_FALSE(st.available(1));
    const auto e = evaluate_energies(st, one[0].rho, 0.0, 1, Cutoff());
    CHECK(e.E.unavailable == std::vector<std::pair<int, int>>{{0, 1}});
    CHECK(e.D.unavailable.size() == 4);
  }
  CHECK_THROWS(DerivativeStack(std::vector<Snapshot>{}, 1));
}

TEST_CASE("I_psi equals its lower bound in one tangential dimension") {
  std::mt19937_64 rng(99);
  for (int c = 0; c < 20; ++c) {
    const auto psi = random_band_limited(64, 0.5, rng);
    const auto omega = random_band_limited(64, 1.0, rng);
    const double a = i_psi(omega, psi), b = i_psi_lower_bound(omega, psi);
    CHECK(a >= 0.0);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, b));
  }
  CHECK_THROWS_AS(i_psi(InterfaceField(16), InterfaceField(32)), InvalidField);
}

TEST_CASE("epsilon = 0 energies coincide bitwise with the unregularized ones") {
  const int n = 32;
  std::mt19937_64 rng(4);
  std::vector<Snapshot> h;
  for (int l = 0; l < 3; ++l) {
    const auto rho = random_band_limited(n, 0.05, rng);
    const Grid g(n, 17);
    const auto u = BulkField::sample(g, [&](double x, double z) { return 0.01 * l * std::cos(x) * std::cos(pi * z); });
    h.push_back({1e-2 * l, u, rho});
  }
  const DerivativeStack st(h, 2);
  const auto e = evaluate_energies(st, h.back().rho, 0.0, 1, Cutoff());
  CHECK(e.E_eps.value == e.E.value);
  CHECK(e.D_eps.value == e.D.value);
  const auto r = evaluate_energies(st, h.back().rho, 1e-2, 1, Cutoff());
  CHECK(r.E_eps.value > r.E.value);
  CHECK(r.D_eps.value > r.D.value);
  for (double v : {r.E.value, r.D.value, r.E_eps.value, r.D_eps.value, r.sobolev_E.value, r.sobolev_D.value})
    CHECK(v >= 0.0);
}

TEST_CASE("decay fit") {
  std::vector<double> t, y;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.02 * i);
    y.push_back(3.0 * std::exp(-1.3 * t.back()));
  }
  const DecayFit f = decay_fit(t, y);
  CHECK(f.status == FitStatus::ok);
  CHECK(f.rate == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.samples == 81);

  SUBCASE("zero or constant signals are degenerate") {
    const std::vector<double> zeros(t.size(), 0.0);
    CHECK(decay_fit(t, zeros).status == FitStatus::degenerate);
    const std::vector<double> two(t.begin(), t.begin() + 2), yy(y.begin(), y.begin() + 2);
    CHECK(decay_fit(two, yy).status == FitStatus::degenerate);
  }
}

TEST_CASE("steady mean, weighted heat and conservation residual") {
  const Grid g(32, 33);
  const Cutoff cut;
  const auto rho = InterfaceField::sample(g.x, [](double x) { return 0.2 + 0.05 * std::sin(x); });
  SUBCASE("zero temperature keeps the mean") {
    CHECK(steady_mean(BulkField(32, 33), rho, cut) == doctest::Approx(0.2).epsilon(1e-13));
  }
  SUBCASE("unit temperature over the flat bulk lowers it by 2") {
    const InterfaceField flat(32, 0.0);
    CHECK(weighted_heat(BulkField(32, 33, 1.0), flat, cut) == doctest::Approx(4 * pi));
    CHECK(steady_mean(BulkField(32, 33, 1.0), flat, cut) == doctest::Approx(-2.0));
  }
  SUBCASE("melting the interface against heat loss balances") {
    const InterfaceField flat(32, 0.0);
    const Snapshot a{0.0, BulkField(32, 33, 0.0), flat};
    const Snapshot b{0.1, BulkField(32, 33, 0.25), InterfaceField(32, 0.5)};
    CHECK(conservation_residual(a, b, cut) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rho_deviation_l2(InterfaceField(32, 0.5), 0.0) == doctest::Approx(0.5 * std::sqrt(2 * pi)));
  }
}

TEST_CASE("equivalence constant") {
  const Cutoff cut;
  CHECK(equivalence_constant(0.0, 0.0, cut) == doctest::Approx(2.0));
  CHECK(equivalence_constant(0.1, 0.2, cut) > equivalence_constant(0.05, 0.1, cut));
  CHECK_THROWS_AS(equivalence_constant(1.0, 0.0, cut), DegenerateTransform);
}
