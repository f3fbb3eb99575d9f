/// @file solver.hpp
/// Time marching of the transformed, regularized Stefan problem.
///
/// Each step solves, on the fixed grid,
///   (u - u^n)/dt = theta L(u; rho) + (1 - theta) L(u^n; rho^n)        z != 0
///   u(., 0) = kappa(rho)                                                z = 0
///   (I + eps d_x^4)(rho - rho^n)/dt = theta <rho>^2 [u_z] + (1 - theta)(...)^n
/// with L u = u_xx + a u_zz - B u_xz - c u_z and Neumann walls, by a
/// fixed-point loop over (u, rho). theta = 1 is backward Euler.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stefan/energy.hpp"
#include "stefan/fields.hpp"
#include "stefan/hanzawa.hpp"
#include "stefan/kernels.hpp"

namespace stefan {

enum class IterationScheme {
  coupled,  ///< linear part of the interface coupling implicit per Fourier mode
  picard,   ///< temperature_step then interface_step
};

struct SolverConfig {
  double epsilon = 0.0;
  double dt = 1e-3;
  int n_x = 64;
  int n_z = 65;
  double fp_tol = 1e-12;
  int fp_max_iter = 60;
  double lin_tol = 1e-13;
  int lin_max_iter = 200;
  double alpha = 0.25;
  int k_diag = 1;
  double theta = 1.0;
  IterationScheme scheme = IterationScheme::coupled;
  /// Number of times a failed step may be retried with dt halved.
  int dt_retries = 0;
  /// Bound on |u(., 0) - kappa(rho)| at accepted steps.
  double consistency_tol = 1e-8;

  /// Throws ConfigError on invalid values.
  void validate() const;
  Grid grid() const { return Grid(n_x, n_z); }
  Cutoff cutoff() const { return Cutoff(alpha); }
};

/// Extra source terms, used for manufactured solutions: added to the bulk
/// equation, to the Dirichlet data at z = 0 and to the jump relation.
struct ForcingFields {
  BulkField bulk;
  InterfaceField dirichlet;
  InterfaceField jump;
};
using Forcing = std::function<ForcingFields(double t)>;

struct State {
  double t = 0.0;
  BulkField u;
  InterfaceField rho;
  /// Interface at the previous accepted step.
  InterfaceField rho_prev;
  /// Interface velocity at the last accepted step (0 before the first step).
  InterfaceField rho_t;
};

State make_state(BulkField u0, InterfaceField rho0, double t0 = 0.0);

/// Solution of the steady problem u_xx + u_zz = 0 with u = kappa(rho0) at
/// z = 0 and Neumann walls.
BulkField compatible_temperature(const InterfaceField& rho0, int n_z);

struct StepInfo {
  int iterations = 0;
  int linear_iterations = 0;
  std::vector<double> diff_norms;
  /// max over iterations of |d_m| / |d_{m-1}|.
  double max_ratio = 0.0;
  double trace_error = 0.0;
  int halvings = 0;
};

class Stepper {
 public:
  explicit Stepper(SolverConfig cfg, Forcing forcing = {});

  const SolverConfig& config() const { return cfg_; }

  /// Fixes the accepted state and step size for the following calls.
  void begin_step(const State& s, double dt);

  /// One linear solve with coefficients frozen at (rho_m, rho_t_m) and
  /// Dirichlet data kappa(rho_m); iterated to lin_tol. `guess` seeds the
  /// lagged terms.
  BulkField temperature_step(const InterfaceField& rho_m, const InterfaceField& rho_t_m,
                             const BulkField& guess, int* iterations = nullptr) const;
  /// rho^n + dt (I + eps d_x^4)^-1 [<rho_m>^2 [u_z] + ...].
  InterfaceField interface_step(const InterfaceField& rho_m, const BulkField& u_new) const;

  /// Advances by dt (with halving retries if configured).
  State fixed_point_step(const State& s, StepInfo* info = nullptr);
  State fixed_point_step(const State& s, double dt, StepInfo* info = nullptr);

 private:
  State attempt(const State& s, double dt, StepInfo& info);
  InterfaceField rate_of(const InterfaceField& rho_m) const;
  void iterate_coupled(InterfaceField& rho, BulkField& u, StepInfo& info);
  void iterate_picard(InterfaceField& rho, BulkField& u, StepInfo& info);

  SolverConfig cfg_;
  Grid grid_;
  Cutoff cutoff_;
  Forcing forcing_;

  // Per-step data set by begin_step.
  const State* base_ = nullptr;
  double dt_ = 0.0;
  double t_new_ = 0.0;
  std::optional<ForcingFields> f_new_;
  BulkField explicit_bulk_;
  InterfaceField explicit_rate_;
};

/// Plain backward-Euler operations on an accepted state (no forcing).
BulkField temperature_step(const InterfaceField& rho_m, const InterfaceField& rho_t_m,
                           const BulkField& u_old, const SolverConfig& cfg);
InterfaceField interface_step(const InterfaceField& rho_m, const BulkField& u_new,
                              const InterfaceField& rho_accepted, const SolverConfig& cfg);
State fixed_point_step(const State& s, const SolverConfig& cfg, StepInfo* info = nullptr);

struct RunOptions {
  double t_end = 1.0;
  Forcing forcing;
  bool diagnostics = true;
  bool identity = true;
  /// Keep a snapshot every `sample_every` steps (0: none). The initial and
  /// final states are always kept when sampling is on.
  int sample_every = 0;
  std::optional<double> rho_bar;
  std::function<void(const EnergyReport&, const State&)> on_step;
};

struct RunResult {
  std::vector<EnergyReport> reports;
  std::vector<Snapshot> samples;
  State final_state;
  int steps = 0;
  double rho_bar = 0.0;
  double max_cons_residual = 0.0;
  double max_trace_error = 0.0;
  double max_contraction = 0.0;
  int max_inner_iters = 0;
};

/// Steps from `initial` to t_end. Throws SolverError subclasses, with the
/// failing step index and time in the message.
RunResult run(const State& initial, const SolverConfig& cfg, const RunOptions& opt);

/// Re-runs from the same initial data for each epsilon in turn.
std::vector<RunResult> run_continuation(const State& initial, const SolverConfig& cfg,
                                        const std::vector<double>& eps_list, const RunOptions& opt);

}  // namespace stefan
