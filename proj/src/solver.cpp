#include "stefan/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "stefan/errors.hpp"
#include "stefan/identity.hpp"
#include "stefan/spectral.hpp"

namespace stefan {

using kernels::ModalField;
using kernels::ModeProblem;

void SolverConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) fail("epsilon must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be > 0");
  if (!(fp_tol > 0.0)) fail("fp_tol must be > 0");
  if (fp_max_iter < 1) fail("fp_max_iter must be >= 1");
  if (!(lin_tol > 0.0)) fail("lin_tol must be > 0");
  if (lin_max_iter < 1) fail("lin_max_iter must be >= 1");
  if (k_diag < 0 || k_diag > 3) fail("k_diag must lie in [0, 3]");
  if (!(theta >= 0.5 && theta <= 1.0)) fail("theta must lie in [0.5, 1]");
  if (dt_retries < 0) fail("dt_retries must be >= 0");
  if (!(consistency_tol > 0.0)) fail("consistency_tol must be > 0");
  if (n_z < 7) fail("n_z must be >= 7");
  Grid g(n_x, n_z);
  Cutoff c(alpha);
  (void)g;
  (void)c;
}

State make_state(BulkField u0, InterfaceField rho0, double t0) {
  if (u0.n_x() != rho0.size()) throw InvalidField("make_state: grid mismatch");
  require_finite(u0, "initial u");
  require_finite(rho0, "initial rho");
  State s;
  s.t = t0;
  s.u = std::move(u0);
  s.rho = rho0;
  s.rho_prev = rho0;
  s.rho_t = InterfaceField(rho0.size());
  return s;
}

namespace {

std::vector<double> row_means(const BulkField& a) {
  std::vector<double> m(a.n_z());
  for (int j = 0; j < a.n_z(); ++j) {
    double s = 0.0;
    for (double v : a.row(j)) s += v;
    m[j] = s / a.n_x();
  }
  return m;
}

BulkField subtract_row_means(const BulkField& a, const std::vector<double>& m) {
  BulkField out = a;
  for (int j = 0; j < a.n_z(); ++j) {
    for (double& v : out.row(j)) v -= m[j];
  }
  return out;
}

std::vector<cplx> fft(const InterfaceField& f) { return fourier(f.size()).forward(f.values()); }

InterfaceField ifft(const std::vector<cplx>& c, int n) {
  return InterfaceField(fourier(n).inverse(c));
}

InterfaceField regularize(const InterfaceField& r, double eps) {
  auto c = fft(r);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double k2 = double(k) * double(k);
    c[k] /= 1.0 + eps * k2 * k2;
  }
  return ifft(c, r.size());
}

double max_abs_rows(const BulkField& a, const BulkField& b, int skip_row) {
  double m = 0.0;
  for (int j = 0; j < a.n_z(); ++j) {
    if (j == skip_row) continue;
    for (int i = 0; i < a.n_x(); ++i) m = std::max(m, std::abs(a(j, i) - b(j, i)));
  }
  return m;
}

InterfaceField bracket_sq(const InterfaceField& rho) {
  InterfaceField rx = d_tangential(rho, 1);
  for (int i = 0; i < rx.size(); ++i) rx[i] = 1.0 + rx[i] * rx[i];
  return rx;
}

}  // namespace

BulkField compatible_temperature(const InterfaceField& rho0, int n_z) {
  const NormalGrid zg(n_z);
  const int nm = rho0.size() / 2 + 1;
  ModeProblem p;
  p.n_z = n_z;
  p.dz = zg.spacing();
  p.mass = 0.0;
  p.theta = 1.0;
  p.a_ref.assign(n_z, 1.0);
  p.rhs = ModalField(nm, n_z);
  p.dirichlet = fft(curvature(rho0));
  auto sol = kernels::solve_modes(p);
  return kernels::inverse_rows(sol.u, rho0.size());
}

// ---------------------------------------------------------------- Stepper

Stepper::Stepper(SolverConfig cfg, Forcing forcing)
    : cfg_(cfg), grid_(cfg.n_x, cfg.n_z), cutoff_(cfg.alpha), forcing_(std::move(forcing)) {
  cfg_.validate();
}

void Stepper::begin_step(const State& s, double dt) {
  if (s.u.n_x() != cfg_.n_x || s.u.n_z() != cfg_.n_z || s.rho.size() != cfg_.n_x) {
    throw InvalidField("state does not match the configured grid");
  }
  base_ = &s;
  dt_ = dt;
  t_new_ = s.t + dt;
  f_new_.reset();
  if (forcing_) f_new_ = forcing_(t_new_);
  if (cfg_.theta < 1.0) {
    const TransformCoefficients k = coefficients(s.rho, s.rho_t, cutoff_, grid_.z);
    explicit_bulk_ = kernels::apply_operator(s.u, k.a, k.b, k.c);
    explicit_rate_ = bracket_sq(s.rho) * jump_un(s.u);
    if (forcing_) {
      const ForcingFields f0 = forcing_(s.t);
      explicit_bulk_ += f0.bulk;
      explicit_rate_ += f0.jump;
    }
  }
}

InterfaceField Stepper::rate_of(const InterfaceField& rho_m) const {
  const double th = cfg_.theta;
  InterfaceField r(rho_m.size());
  for (int i = 0; i < r.size(); ++i) {
    const double d = (rho_m[i] - base_->rho[i]) / dt_;
    r[i] = th == 1.0 ? d : (d - (1.0 - th) * base_->rho_t[i]) / th;
  }
  return r;
}

namespace {

// Right-hand side of the per-mode solve on rows z != 0.
ModalField bulk_rhs(const State& base, double dt, double theta, const BulkField& lag,
                    const BulkField* f_bulk, const BulkField* explicit_bulk) {
  const int nx = base.u.n_x(), nz = base.u.n_z();
  BulkField r(nx, nz);
  for (int j = 0; j < nz; ++j) {
    for (int i = 0; i < nx; ++i) {
      double v = base.u(j, i) / dt + theta * lag(j, i);
      if (f_bulk) v += theta * (*f_bulk)(j, i);
      if (explicit_bulk) v += (1.0 - theta) * (*explicit_bulk)(j, i);
      r(j, i) = v;
    }
  }
  return kernels::forward_rows(r);
}

}  // namespace

BulkField Stepper::temperature_step(const InterfaceField& rho_m, const InterfaceField& rho_t_m,
                                    const BulkField& guess, int* iterations) const {
  if (!base_) throw std::logic_error("temperature_step before begin_step");
  const TransformCoefficients k = coefficients(rho_m, rho_t_m, cutoff_, grid_.z);
  const std::vector<double> abar = row_means(k.a);
  const BulkField adev = subtract_row_means(k.a, abar);
  InterfaceField dir = curvature(rho_m);
  if (f_new_) dir += f_new_->dirichlet;

  ModeProblem p;
  p.n_z = cfg_.n_z;
  p.dz = grid_.z.spacing();
  p.mass = 1.0 / dt_;
  p.theta = cfg_.theta;
  p.a_ref = abar;
  p.dirichlet = fft(dir);
  const int c = grid_.z.center();
  const BulkField* fb = f_new_ ? &f_new_->bulk : nullptr;
  const BulkField* eb = cfg_.theta < 1.0 ? &explicit_bulk_ : nullptr;

  BulkField u = guess;
  BulkField lag = kernels::apply_operator(u, adev, k.b, k.c, false);
  double res = 0.0;
  for (int l = 1; l <= cfg_.lin_max_iter; ++l) {
    p.rhs = bulk_rhs(*base_, dt_, cfg_.theta, lag, fb, eb);
    auto sol = kernels::solve_modes(p);
    BulkField u_new = kernels::inverse_rows(sol.u, cfg_.n_x);
    BulkField lag_new = kernels::apply_operator(u_new, adev, k.b, k.c, false);
    res = dt_ * cfg_.theta * max_abs_rows(lag_new, lag, c);
    u = std::move(u_new);
    lag = std::move(lag_new);
    if (res <= cfg_.lin_tol) {
      if (iterations) *iterations = l;
      return u;
    }
  }
  std::ostringstream os;
  os << "temperature solve did not reach lin_tol=" << cfg_.lin_tol << " in " << cfg_.lin_max_iter
     << " iterations (residual " << res << ")";
  throw LinearSolveError(os.str(), res);
}

InterfaceField Stepper::interface_step(const InterfaceField& rho_m, const BulkField& u_new) const {
  if (!base_) throw std::logic_error("interface_step before begin_step");
  InterfaceField r = bracket_sq(rho_m) * jump_un(u_new);
  if (f_new_) r += f_new_->jump;
  r *= cfg_.theta;
  if (cfg_.theta < 1.0) r += (1.0 - cfg_.theta) * explicit_rate_;
  InterfaceField out = base_->rho;
  out += dt_ * regularize(r, cfg_.epsilon);
  return out;
}

void Stepper::iterate_coupled(InterfaceField& rho, BulkField& u, StepInfo& info) {
  const int nx = cfg_.n_x;
  const int nm = nx / 2 + 1;
  const double th = cfg_.theta;
  const std::vector<cplx> rho_n_hat = fft(base_->rho);
  std::vector<cplx> rn_hat;
  if (th < 1.0) rn_hat = fft(explicit_rate_);
  std::vector<double> den(nm);
  for (int k = 0; k < nm; ++k) den[k] = 1.0 + cfg_.epsilon * std::pow(double(k), 4);
  const BulkField* fb = f_new_ ? &f_new_->bulk : nullptr;
  const BulkField* eb = th < 1.0 ? &explicit_bulk_ : nullptr;

  ModeProblem p;
  p.n_z = cfg_.n_z;
  p.dz = grid_.z.spacing();
  p.mass = 1.0 / dt_;
  p.theta = th;
  p.coupled = true;
  p.rho_pred.resize(nm);
  p.rho_gain.resize(nm);
  for (int k = 0; k < nm; ++k) p.rho_gain[k] = dt_ * th / den[k];

  double prev = 0.0;
  for (int m = 1; m <= cfg_.fp_max_iter; ++m) {
    const InterfaceField rho_t = rate_of(rho);
    const TransformCoefficients k = coefficients(rho, rho_t, cutoff_, grid_.z);
    p.a_ref = row_means(k.a);
    const BulkField adev = subtract_row_means(k.a, p.a_ref);
    const BulkField lag = kernels::apply_operator(u, adev, k.b, k.c, false);
    p.rhs = bulk_rhs(*base_, dt_, th, lag, fb, eb);

    // Dirichlet data: kappa(rho) - rho_xx is lagged, rho_xx is implicit.
    InterfaceField dir = curvature(rho);
    if (f_new_) dir += f_new_->dirichlet;
    p.dirichlet = fft(dir);
    const std::vector<cplx> rho_hat = fft(rho);
    for (int q = 0; q < nm; ++q) p.dirichlet[q] += double(q) * double(q) * rho_hat[q];

    // Jump relation: (<rho>^2 - 1) [u_z] is lagged, [u_z] is implicit.
    InterfaceField rl = bracket_sq(rho);
    for (int i = 0; i < nx; ++i) rl[i] -= 1.0;
    rl = rl * jump_un(u);
    if (f_new_) rl += f_new_->jump;
    const std::vector<cplx> r_hat = fft(rl);
    for (int q = 0; q < nm; ++q) {
      cplx add = th * r_hat[q];
      if (th < 1.0) add += (1.0 - th) * rn_hat[q];
      p.rho_pred[q] = rho_n_hat[q] + dt_ * add / den[q];
    }

    auto sol = kernels::solve_modes(p);
    BulkField u_new = kernels::inverse_rows(sol.u, nx);
    InterfaceField rho_new = ifft(sol.rho, nx);
    const double d =
        std::sqrt(std::max(0.0, energy_k0(u_new - u, rho_new - rho, rho_new, cfg_.epsilon, cutoff_).E_eps));
    info.diff_norms.push_back(d);
    if (m > 1 && prev > 0.0) info.max_ratio = std::max(info.max_ratio, d / prev);
    prev = d;
    u = std::move(u_new);
    rho = std::move(rho_new);
    if (d < cfg_.fp_tol) {
      info.iterations = m;
      return;
    }
  }
  std::ostringstream os;
  os << "fixed-point loop did not converge in " << cfg_.fp_max_iter
     << " iterations (last difference " << prev << ", contraction ratio " << info.max_ratio
     << "); reduce dt";
  throw FixedPointError(os.str(), cfg_.fp_max_iter, info.max_ratio);
}

void Stepper::iterate_picard(InterfaceField& rho, BulkField& u, StepInfo& info) {
  double prev = 0.0;
  for (int m = 1; m <= cfg_.fp_max_iter; ++m) {
    const InterfaceField rho_t = rate_of(rho);
    int lin = 0;
    BulkField u_new = temperature_step(rho, rho_t, u, &lin);
    info.linear_iterations += lin;
    InterfaceField rho_new = interface_step(rho, u_new);
    require_finite(rho_new, "interface iterate");
    const double d =
        std::sqrt(std::max(0.0, energy_k0(u_new - u, rho_new - rho, rho_new, cfg_.epsilon, cutoff_).E_eps));
    info.diff_norms.push_back(d);
    if (m > 1 && prev > 0.0) info.max_ratio = std::max(info.max_ratio, d / prev);
    prev = d;
    u = std::move(u_new);
    rho = std::move(rho_new);
    if (d < cfg_.fp_tol) {
      info.iterations = m;
      return;
    }
  }
  std::ostringstream os;
  os << "fixed-point loop did not converge in " << cfg_.fp_max_iter
     << " iterations (last difference " << prev << ", contraction ratio " << info.max_ratio
     << "); reduce dt";
  throw FixedPointError(os.str(), cfg_.fp_max_iter, info.max_ratio);
}

State Stepper::attempt(const State& s, double dt, StepInfo& info) {
  begin_step(s, dt);
  InterfaceField rho = s.rho;
  BulkField u = s.u;
  if (cfg_.scheme == IterationScheme::coupled) {
    iterate_coupled(rho, u, info);
  } else {
    iterate_picard(rho, u, info);
  }
  InterfaceField trace_ref = curvature(rho);
  if (f_new_) trace_ref += f_new_->dirichlet;
  const InterfaceField tr = u.trace();
  double err = 0.0;
  for (int i = 0; i < tr.size(); ++i) err = std::max(err, std::abs(tr[i] - trace_ref[i]));
  info.trace_error = std::max(info.trace_error, err);
  if (err > cfg_.consistency_tol) {
    std::ostringstream os;
    os << "trace consistency violated: |u(.,0) - kappa(rho)| = " << err;
    throw SolverError(os.str());
  }
  State out;
  out.t = t_new_;
  out.rho_t = rate_of(rho);
  out.u = std::move(u);
  out.rho = std::move(rho);
  out.rho_prev = s.rho;
  base_ = nullptr;
  return out;
}

State Stepper::fixed_point_step(const State& s, StepInfo* info) {
  return fixed_point_step(s, cfg_.dt, info);
}

State Stepper::fixed_point_step(const State& s, double dt, StepInfo* info) {
  StepInfo local;
  StepInfo& inf = info ? *info : local;
  std::function<State(const State&, double, int)> advance = [&](const State& from, double h,
                                                                 int depth) -> State {
    try {
      StepInfo trial;
      State next = attempt(from, h, trial);
      inf.iterations += trial.iterations;
      inf.linear_iterations += trial.linear_iterations;
      inf.diff_norms.insert(inf.diff_norms.end(), trial.diff_norms.begin(), trial.diff_norms.end());
      inf.max_ratio = std::max(inf.max_ratio, trial.max_ratio);
      inf.trace_error = std::max(inf.trace_error, trial.trace_error);
      return next;
    } catch (const FixedPointError&) {
      if (depth >= cfg_.dt_retries) throw;
    } catch (const LinearSolveError&) {
      if (depth >= cfg_.dt_retries) throw;
    } catch (const DegenerateTransform&) {
      // a diverging iterate can fold the transform before the loop gives up
      if (depth >= cfg_.dt_retries) throw;
    }
    inf.halvings = std::max(inf.halvings, depth + 1);
    State mid = advance(from, 0.5 * h, depth + 1);
    return advance(mid, from.t + h - mid.t, depth + 1);
  };
  return advance(s, dt, 0);
}

BulkField temperature_step(const InterfaceField& rho_m, const InterfaceField& rho_t_m,
                           const BulkField& u_old, const SolverConfig& cfg) {
  Stepper st(cfg);
  State base = make_state(u_old, rho_m);
  st.begin_step(base, cfg.dt);
  return st.temperature_step(rho_m, rho_t_m, u_old);
}

InterfaceField interface_step(const InterfaceField& rho_m, const BulkField& u_new,
                              const InterfaceField& rho_accepted, const SolverConfig& cfg) {
  Stepper st(cfg);
  State base = make_state(BulkField(u_new.n_x(), u_new.n_z()), rho_accepted);
  st.begin_step(base, cfg.dt);
  return st.interface_step(rho_m, u_new);
}

State fixed_point_step(const State& s, const SolverConfig& cfg, StepInfo* info) {
  Stepper st(cfg);
  return st.fixed_point_step(s, info);
}

// ---------------------------------------------------------------- run

namespace {

std::string pairs_text(const EnergyBreakdown& b) {
  std::ostringstream os;
  bool first = true;
  auto add = [&](const char* tag, const FunctionalValue& v) {
    for (auto [mu, s] : v.unavailable) {
      if (!first) os << ' ';
      os << tag << mu << ':' << s;
      first = false;
    }
  };
  add("E", b.E);
  add("D", b.D);
  return os.str();
}

void fill_energies(EnergyReport& r, const EnergyBreakdown& b) {
  r.E = b.E.value;
  r.D = b.D.value;
  r.E_eps = b.E_eps.value;
  r.D_eps = b.D_eps.value;
  r.sobolev_E = b.sobolev_E.value;
  r.sobolev_D = b.sobolev_D.value;
  r.i_psi_min_gap = b.i_psi_min_gap;
  r.E_complete = b.E.complete();
  r.D_complete = b.D.complete();
  r.unavailable = pairs_text(b);
}

}  // namespace

RunResult run(const State& initial, const SolverConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  Stepper stepper(cfg, opt.forcing);
  const Cutoff cutoff = cfg.cutoff();
  RunResult res;
  res.rho_bar = opt.rho_bar ? *opt.rho_bar : steady_mean(initial.u, initial.rho, cutoff);
  const int k = cfg.k_diag;
  const std::size_t H = std::max<std::size_t>({std::size_t(2 * k + 1), std::size_t(k + 2), 3});

  std::deque<Snapshot> hist;
  hist.push_back({initial.t, initial.u, initial.rho});
  std::vector<Snapshot> buf;
  auto evaluate_at = [&](std::size_t at) {
    buf.assign(hist.begin(), hist.end());
    DerivativeStack stack(buf, at, k + 1);
    return evaluate_energies(stack, buf[at].rho, cfg.epsilon, k, cutoff);
  };

  auto base_report = [&](const State& s) {
    EnergyReport r;
    r.t = s.t;
    r.rho_mean = s.rho.mean();
    r.rho_dev_l2 = rho_deviation_l2(s.rho, res.rho_bar);
    return r;
  };

  EnergyReport r0 = base_report(initial);
  if (opt.diagnostics) fill_energies(r0, evaluate_at(0));
  res.reports.push_back(r0);
  bool initial_complete = !opt.diagnostics || (r0.E_complete && r0.D_complete);
  if (opt.on_step) opt.on_step(res.reports.back(), initial);
  if (opt.sample_every > 0) res.samples.push_back(hist.back());

  State state = initial;
  const double span = opt.t_end - initial.t;
  const int n_steps = span <= 0.0 ? 0 : static_cast<int>(std::ceil(span / cfg.dt - 1e-9));
  for (int n = 1; n <= n_steps; ++n) {
    const double target = (n == n_steps) ? opt.t_end : initial.t + n * cfg.dt;
    StepInfo info;
    try {
      state = stepper.fixed_point_step(state, target - state.t, &info);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "step " << n << " (t=" << state.t << " -> " << target << "): " << e.what();
      throw StepFailure(os.str(), n, state.t);
    }
    state.t = target;
    const Snapshot& before = hist.back();
    Snapshot now{state.t, state.u, state.rho};
    EnergyReport r = base_report(state);
    r.inner_iters = info.iterations;
    r.trace_error = info.trace_error;
    r.cons_residual = conservation_residual(before, now, cutoff);
    hist.push_back(std::move(now));
    const bool initial_in_hist = hist.size() <= H;
    if (hist.size() > H) hist.pop_front();

    if (opt.diagnostics) {
      fill_energies(r, evaluate_at(hist.size() - 1));
      if (!initial_complete && initial_in_hist) {
        EnergyReport& first = res.reports.front();
        fill_energies(first, evaluate_at(0));
        initial_complete = first.E_complete && first.D_complete;
      }
    }
    if (opt.identity && hist.size() >= 3) {
      buf.assign(hist.end() - 3, hist.end());
      auto id = identity_residual_k0(buf, cfg.epsilon, cutoff);
      if (id) res.reports.back().identity_residual = id->residual;
    }
    res.max_cons_residual = std::max(res.max_cons_residual, r.cons_residual);
    res.max_trace_error = std::max(res.max_trace_error, r.trace_error);
    res.max_contraction = std::max(res.max_contraction, info.max_ratio);
    res.max_inner_iters = std::max(res.max_inner_iters, info.iterations);
    res.reports.push_back(r);
    res.steps = n;
    if (opt.on_step) opt.on_step(res.reports.back(), state);
    if (opt.sample_every > 0 && (n % opt.sample_every == 0 || n == n_steps)) {
      res.samples.push_back(hist.back());
    }
  }
  res.final_state = state;
  return res;
}

std::vector<RunResult> run_continuation(const State& initial, const SolverConfig& cfg,
                                        const std::vector<double>& eps_list, const RunOptions& opt) {
  std::vector<RunResult> out;
  for (double eps : eps_list) {
    SolverConfig c = cfg;
    c.epsilon = eps;
    out.push_back(run(initial, c, opt));
  }
  return out;
}

}  // namespace stefan
