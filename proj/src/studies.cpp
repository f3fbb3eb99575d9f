#include "stefan/studies.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>

#include "stefan/config.hpp"
#include "stefan/oracle.hpp"

namespace stefan::studies {

SolverConfig decay_config(double epsilon) {
  SolverConfig c;
  c.epsilon = epsilon;
  c.n_x = 32;
  c.n_z = 65;
  c.dt = 1e-3;
  return c;
}

State decay_state(const SolverConfig& cfg, double amplitude) {
  const Grid g = cfg.grid();
  InterfaceField rho = InterfaceField::sample(g.x, [&](double x) { return amplitude * std::sin(x); });
  return make_state(compatible_temperature(rho, cfg.n_z), rho);
}

double observed_order(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return 0.0;
  return std::log2(coarse / fine);
}

// ---------------------------------------------------------------- 1

SteadyResult steady_state(int steps, double rho0) {
  SolverConfig c;
  c.n_x = 64;
  c.n_z = 65;
  c.dt = 1e-3;
  State s = make_state(BulkField(c.n_x, c.n_z), InterfaceField(c.n_x, rho0));
  SteadyResult out;
  RunOptions opt;
  opt.t_end = steps * c.dt;
  opt.diagnostics = false;
  opt.identity = false;
  opt.on_step = [&](const EnergyReport&, const State& st) {
    double d = 0.0;
    for (int i = 0; i < st.rho.size(); ++i) d = std::max(d, std::abs(st.rho[i] - rho0));
    out.max_dev = std::max(out.max_dev, st.u.max_abs() + d);
  };
  out.steps = run(s, c, opt).steps;
  return out;
}

// ---------------------------------------------------------------- 2

IPsiResult i_psi_positivity(int count, std::uint64_t seed, int n_x) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp_psi(0.01, 0.5), amp_omega(1e-3, 1.0);
  IPsiResult out;
  out.min_gap = 1e300;
  for (int n = 0; n < count; ++n) {
    const InterfaceField psi = random_band_limited(n_x, amp_psi(rng), rng);
    const InterfaceField omega = random_band_limited(n_x, amp_omega(rng), rng);
    const double gap = i_psi(omega, psi) - i_psi_lower_bound(omega, psi);
    out.min_gap = std::min(out.min_gap, gap);
    out.max_abs_gap = std::max(out.max_abs_gap, std::abs(gap));
    ++out.cases;
  }
  return out;
}

// ---------------------------------------------------------------- 3

ConservationResult conservation(double t_end, double u_shift, int levels) {
  ConservationResult out;
  for (int l = 0; l < levels; ++l) {
    SolverConfig c = decay_config();
    c.dt = 1e-3 / (1 << l);
    c.n_z = 64 * (1 << l) + 1;
    State s = decay_state(c);
    if (u_shift != 0.0) {
      s.u += BulkField::sample(c.grid(), [&](double, double z) { return z > 0 ? u_shift * (2 * z - z * z) : 0.0; });
    }
    RunOptions opt;
    opt.t_end = t_end;
    opt.diagnostics = false;
    opt.identity = false;
    const RunResult r = run(s, c, opt);
    out.levels.push_back({c.dt, c.n_x, c.n_z, r.max_cons_residual});
  }
  if (out.levels.size() >= 2) {
    const double a = out.levels[0].value, b = out.levels[1].value;
    out.ratio = b > 0.0 ? a / b : 0.0;
    out.order = observed_order(a, b);
  }
  return out;
}

// ---------------------------------------------------------------- 4

MonotonicityResult monotonicity(double epsilon, double t_end) {
  const SolverConfig c = decay_config(epsilon);
  RunOptions opt;
  opt.t_end = t_end;
  opt.identity = false;
  const RunResult r = run(decay_state(c), c, opt);
  MonotonicityResult out;
  const auto& rep = r.reports;
  out.E0 = rep.front().E;
  out.steps = r.steps;
  out.max_increase = -1e300;
  out.max_integrated = -1e300;
  double acc = 0.0;
  for (std::size_t j = 1; j < rep.size(); ++j) {
    acc += 0.5 * rep[j].D * (rep[j].t - rep[j - 1].t);
    out.max_integrated = std::max(out.max_integrated, (rep[j].E + acc) / out.E0 - 1.0);
    if (j + 1 < rep.size()) out.max_increase = std::max(out.max_increase, rep[j + 1].E / rep[j].E - 1.0);
  }
  return out;
}

// ---------------------------------------------------------------- 5

DecayResult decay(double t_end, double epsilon, int n_z_dense) {
  const SolverConfig c = decay_config(epsilon);
  RunOptions opt;
  opt.t_end = t_end;
  opt.identity = false;
  const RunResult r = run(decay_state(c), c, opt);
  std::vector<double> t, y;
  for (const auto& q : r.reports) {
    t.push_back(q.t);
    y.push_back(q.E + q.rho_dev_l2 * q.rho_dev_l2);
  }
  DecayResult out;
  out.fit = decay_fit(t, y);
  out.lambda1 = oracle::linearized_spectrum(1, n_z_dense, epsilon).eigenvalues.front().real();
  const double target = 2.0 * std::abs(out.lambda1);
  out.rel_error = std::abs(out.fit.rate - target) / target;
  return out;
}

// ---------------------------------------------------------------- 6

double epsilon_distance(const std::vector<Snapshot>& a, const std::vector<Snapshot>& b,
                        const Cutoff& cutoff) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("epsilon_distance: sample mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& sb = b[i];
    num = std::max(num, energy_k0(a[i].u - sb.u, a[i].rho - sb.rho, sb.rho, 0.0, cutoff).E);
    den = std::max(den, energy_k0(sb.u, sb.rho, sb.rho, 0.0, cutoff).E);
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

EpsilonResult epsilon_continuation(std::vector<double> eps, double t_end) {
  const SolverConfig c = decay_config();
  const State s0 = decay_state(c);
  RunOptions opt;
  opt.t_end = t_end;
  opt.diagnostics = false;
  opt.identity = false;
  opt.sample_every = 10;
  const auto runs = run_continuation(s0, c, eps, opt);
  EpsilonResult out;
  out.eps = eps;
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    out.distance.push_back(epsilon_distance(runs[i].samples, runs[i + 1].samples, c.cutoff()));
  }
  return out;
}

// ---------------------------------------------------------------- 7

IdentityResult identity(double t_mid, double epsilon) {
  IdentityResult out;
  for (int l = 0; l < 2; ++l) {
    SolverConfig c = decay_config(epsilon);
    c.dt /= (1 << l);
    c.n_x *= (1 << l);
    c.n_z = (c.n_z - 1) * (1 << l) + 1;
    std::deque<Snapshot> window;
    RunOptions opt;
    opt.t_end = t_mid + c.dt;
    opt.diagnostics = false;
    opt.identity = false;
    opt.on_step = [&](const EnergyReport&, const State& st) {
      window.push_back({st.t, st.u, st.rho});
      if (window.size() > 3) window.pop_front();
    };
    run(decay_state(c), c, opt);
    const std::vector<Snapshot> w(window.begin(), window.end());
    auto terms = identity_residual_k0(w, epsilon, c.cutoff());
    out.terms.push_back(*terms);
    out.levels.push_back({c.dt, c.n_x, c.n_z, terms->residual});
  }
  out.ratio = out.levels[1].value > 0.0 ? out.levels[0].value / out.levels[1].value : 0.0;
  return out;
}

// ---------------------------------------------------------------- 8

namespace {

double mms_error(const SolverConfig& c, double t_end) {
  const oracle::ManufacturedSolution m;
  const Grid g = c.grid();
  const Cutoff cut = c.cutoff();
  State s = make_state(oracle::manufactured_u(m, 0.0, g), oracle::manufactured_rho(m, 0.0, g.x));
  s.rho_t = InterfaceField::sample(g.x, [&](double x) { return m.rho_t(0.0, x); });
  RunOptions opt;
  opt.t_end = t_end;
  opt.diagnostics = false;
  opt.identity = false;
  opt.forcing = [&](double t) {
    auto f = oracle::manufactured_forcing(m, t, g, cut, c.epsilon);
    return ForcingFields{std::move(f.bulk), std::move(f.dirichlet), std::move(f.jump)};
  };
  const State end = run(s, c, opt).final_state;
  const BulkField du = end.u - oracle::manufactured_u(m, t_end, g);
  const InterfaceField dr = end.rho - oracle::manufactured_rho(m, t_end, g.x);
  return std::max(du.max_abs(), dr.max_abs());
}

}  // namespace

MmsResult mms(double epsilon) {
  const double t_end = 0.2;
  MmsResult out;
  for (int l = 0; l < 2; ++l) {
    SolverConfig c;
    c.epsilon = epsilon;
    c.n_x = 16;
    c.n_z = 1025;
    c.dt = 0.04 / (1 << l);
    out.time_levels.push_back({c.dt, c.n_x, c.n_z, mms_error(c, t_end)});
  }
  for (int l = 0; l < 2; ++l) {
    SolverConfig c;
    c.epsilon = epsilon;
    c.n_x = 16;
    c.n_z = 16 * (1 << l) + 1;
    c.dt = 1e-3;
    c.theta = 0.5;
    out.z_levels.push_back({c.dt, c.n_x, c.n_z, mms_error(c, t_end)});
  }
  out.time_order = observed_order(out.time_levels[0].value, out.time_levels[1].value);
  out.z_order = observed_order(out.z_levels[0].value, out.z_levels[1].value);
  return out;
}

// ---------------------------------------------------------------- 9

NormsResult norm_equivalence(int count, std::uint64_t seed, int n_x, int n_z) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0), amp_rho(0.005, 0.08), amp_u(1e-3, 1.0);
  const Grid g(n_x, n_z);
  const Cutoff cut(0.25);
  const double eps_choices[] = {0.0, 1e-4, 1e-2};
  auto random_bulk = [&](double amp) {
    std::vector<double> c;
    for (int i = 0; i < 3 * 4 * 2; ++i) c.push_back(U(rng));
    BulkField f = BulkField::sample(g, [&](double x, double z) {
      double v = 0.0;
      int n = 0;
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 4; ++l) {
          const double zp = std::cos(l * std::numbers::pi * (z + 1.0) / 2.0) + 0.3 * std::abs(z);
          v += (c[n] * std::cos(k * x) + c[n + 1] * std::sin(k * x)) * zp / (1.0 + k * k + l * l);
          n += 2;
        }
      }
      return v;
    });
    const double m = f.max_abs();
    if (m > 0.0) f *= amp / m;
    return f;
  };
  NormsResult out;
  out.worst_low = 1e300;
  out.worst_high = 0.0;
  for (int n = 0; n < count; ++n) {
    const double eps = eps_choices[n % 3];
    std::array<BulkField, 3> uc;
    std::array<InterfaceField, 3> rc;
    for (int p = 0; p < 3; ++p) {
      uc[p] = random_bulk(amp_u(rng));
      rc[p] = random_band_limited(n_x, amp_rho(rng) / (1.0 + p), rng);
    }
    const double h = 1e-2;
    std::vector<Snapshot> hist;
    for (int s = 0; s < 4; ++s) {
      const double t = s * h;
      hist.push_back({t, uc[0] + t * uc[1] + (t * t) * uc[2], rc[0] + t * rc[1] + (t * t) * rc[2]});
    }
    const DerivativeStack stack(hist, 2);
    const InterfaceField& psi = hist.back().rho;
    const EnergyBreakdown b = evaluate_energies(stack, psi, eps, 1, cut);
    const double C = equivalence_constant(psi.max_abs(), d_tangential(psi, 1).max_abs(), cut);
    out.max_C = std::max(out.max_C, C);
    const double rE = b.E_eps.value / b.sobolev_E.value;
    const double rD = b.D_eps.value / b.sobolev_D.value;
    out.worst_low = std::min({out.worst_low, rE * C, rD * C});
    out.worst_high = std::max({out.worst_high, rE / C, rD / C});
    ++out.cases;
  }
  return out;
}

// ---------------------------------------------------------------- 10

MeanResult mean_convergence(double t_end, double bump) {
  const SolverConfig c = decay_config();
  State s = decay_state(c);
  s.u += BulkField::sample(c.grid(), [&](double, double z) {
    const double a = std::abs(z);
    return bump * (2.0 * a - z * z);
  });
  MeanResult out;
  out.predicted = steady_mean(s.u, s.rho, c.cutoff());
  RunOptions opt;
  opt.t_end = t_end;
  opt.diagnostics = false;
  opt.identity = false;
  const RunResult r = run(s, c, opt);
  out.mean_end = r.final_state.rho.mean();
  out.error = std::abs(out.mean_end - out.predicted);
  return out;
}

}  // namespace stefan::studies
