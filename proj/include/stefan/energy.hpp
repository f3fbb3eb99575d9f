/// @file energy.hpp
/// Energy and dissipation functionals, the interface form I_psi, Sobolev
/// norms, conservation residual and decay-rate fit.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stefan/fields.hpp"
#include "stefan/hanzawa.hpp"

namespace stefan {

/// One accepted state.
struct Snapshot {
  double t = 0.0;
  BulkField u;
  InterfaceField rho;
};

/// Time-difference quotients d^s/dt^s of (u, rho) at one history entry.
///
/// The s-th derivative uses s+1 consecutive samples, ending at the evaluation
/// entry when possible (backward quotient). When fewer older samples exist
/// but later ones do, the window is shifted forward and the derivative is
/// flagged as `forward`. Otherwise the order is unavailable.
class DerivativeStack {
 public:
  /// history is ordered oldest to newest; `at` indexes the evaluation entry.
  DerivativeStack(std::span<const Snapshot> history, std::size_t at, int max_order);
  /// Convenience: evaluate at the newest entry.
  DerivativeStack(std::span<const Snapshot> history, int max_order);

  double t() const { return t_; }
  int max_order() const { return static_cast<int>(u_.size()) - 1; }
  bool available(int s) const { return s <= max_order() && avail_[s]; }
  bool forward(int s) const { return available(s) && fwd_[s]; }
  const BulkField& u(int s) const { return u_.at(s); }
  const InterfaceField& rho(int s) const { return rho_.at(s); }

 private:
  double t_ = 0.0;
  std::vector<BulkField> u_;
  std::vector<InterfaceField> rho_;
  std::vector<bool> avail_;
  std::vector<bool> fwd_;
};

/// Sum with the (mu, s) pairs that could not be evaluated.
struct FunctionalValue {
  double value = 0.0;
  std::vector<std::pair<int, int>> unavailable;
  bool complete() const { return unavailable.empty(); }
};

/// All functionals at one state.
struct EnergyBreakdown {
  FunctionalValue E, D, E_eps, D_eps;
  FunctionalValue sobolev_E, sobolev_D;
  /// min over evaluated terms of I_psi(w) - int w_xx^2 <psi>^-3.
  double i_psi_min_gap = 0.0;
  /// true if any term used a forward-shifted time quotient.
  bool used_forward = false;
};

/// Pairs (mu, s) with mu + 2 s <= 2 k.
std::vector<std::pair<int, int>> derivative_pairs(int k_diag);

double i_psi(const InterfaceField& omega, const InterfaceField& psi);
/// int omega_xx^2 <psi>^-3.
double i_psi_lower_bound(const InterfaceField& omega, const InterfaceField& psi);

/// Evaluates E, D, E_eps, D_eps and the Sobolev norms at order k_diag with
/// weights from psi. The stack must hold time orders up to k_diag + 1.
EnergyBreakdown evaluate_energies(const DerivativeStack& stack, const InterfaceField& psi,
                                  double epsilon, int k_diag, const Cutoff& cutoff);

FunctionalValue energy_E(const DerivativeStack& stack, const InterfaceField& psi, int k_diag,
                         const Cutoff& cutoff);
FunctionalValue dissipation_D(const DerivativeStack& stack, const InterfaceField& psi,
                              int k_diag, const Cutoff& cutoff);
FunctionalValue energy_eps(const DerivativeStack& stack, const InterfaceField& psi,
                           double epsilon, int k_diag, const Cutoff& cutoff);
FunctionalValue dissipation_eps(const DerivativeStack& stack, const InterfaceField& psi,
                                double epsilon, int k_diag, const Cutoff& cutoff);
std::pair<FunctionalValue, FunctionalValue> sobolev_norms(const DerivativeStack& stack,
                                                          double epsilon, int k_diag);

/// k = 0 energy of an arbitrary pair (U, omega) with weights from psi.
struct StaticEnergy {
  double E = 0.0;
  double E_eps = 0.0;
};
StaticEnergy energy_k0(const BulkField& U, const InterfaceField& omega, const InterfaceField& psi,
                       double epsilon, const Cutoff& cutoff);

/// Equivalence constant between (E_eps, D_eps) and the Sobolev norms from
/// the sup bounds of psi and psi_x.
double equivalence_constant(double psi_sup, double psi_x_sup, const Cutoff& cutoff);

double conservation_residual(const Snapshot& before, const Snapshot& after, const Cutoff& cutoff);
/// int u (1 + phi' rho) over the bulk.
double weighted_heat(const BulkField& u, const InterfaceField& rho, const Cutoff& cutoff);
double steady_mean(const BulkField& u0, const InterfaceField& rho0, const Cutoff& cutoff);
/// Discrete L2 norm of rho - rho_bar on the torus.
double rho_deviation_l2(const InterfaceField& rho, double rho_bar);

enum class FitStatus { ok, degenerate };

struct DecayFit {
  double rate = 0.0;  ///< K2 estimate (minus the slope of ln y)
  double r_squared = 0.0;
  double intercept = 0.0;
  FitStatus status = FitStatus::degenerate;
  std::size_t samples = 0;
};

/// Least-squares fit of ln(y) against t after discarding the first
/// `discard` fraction of the samples.
DecayFit decay_fit(std::span<const double> t, std::span<const double> y, double discard = 0.2);

/// One diagnostics record per accepted step.
struct EnergyReport {
  double t = 0.0;
  double E = 0.0, D = 0.0, E_eps = 0.0, D_eps = 0.0;
  double i_psi_min_gap = 0.0;
  double sobolev_E = 0.0, sobolev_D = 0.0;
  double cons_residual = 0.0;
  double rho_dev_l2 = 0.0;
  std::optional<double> identity_residual;
  int inner_iters = 0;
  double rho_mean = 0.0;
  double trace_error = 0.0;
  bool E_complete = true;
  bool D_complete = true;
  /// "mu:s" pairs missing from E or D, or empty.
  std::string unavailable;
};

}  // namespace stefan
