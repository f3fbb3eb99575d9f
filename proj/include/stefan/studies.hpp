/// @file studies.hpp
/// Reference scenarios and the verification studies driven by the CLI
/// `verify` verb and by the acceptance test.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stefan/energy.hpp"
#include "stefan/identity.hpp"
#include "stefan/solver.hpp"

namespace stefan::studies {

/// Pinned thresholds.
namespace limits {
inline constexpr double steady_dev = 1e-8;
inline constexpr double i_psi_gap = 1e-10;
inline constexpr double cons_residual = 1e-6;
inline constexpr double refinement_ratio = 1.8;
inline constexpr double monotone_tol = 1e-6;
inline constexpr double integrated_tol = 1e-3;
inline constexpr double fit_r2 = 0.999;
inline constexpr double decay_rel = 0.10;
inline constexpr double eps_rel = 0.05;
inline constexpr double mms_time_order = 1.0;
inline constexpr double mms_z_order = 1.8;
inline constexpr double mean_err = 1e-4;
}  // namespace limits

/// Reference grid and step of the decay-k1 scenario.
SolverConfig decay_config(double epsilon = 0.0);
/// rho0 = amplitude sin x with the compatible temperature.
State decay_state(const SolverConfig& cfg, double amplitude = 1e-3);

struct SteadyResult {
  double max_dev = 0.0;
  int steps = 0;
  bool pass() const { return max_dev <= limits::steady_dev; }
};
SteadyResult steady_state(int steps = 2000, double rho0 = 0.1);

struct IPsiResult {
  int cases = 0;
  double min_gap = 0.0;      ///< min of i_psi - lower bound
  double max_abs_gap = 0.0;  ///< max |i_psi - lower bound|
  bool pass() const { return min_gap >= -limits::i_psi_gap && max_abs_gap <= limits::i_psi_gap; }
};
IPsiResult i_psi_positivity(int count = 100, std::uint64_t seed = 20240611, int n_x = 64);

struct RefinementLevel {
  double dt = 0.0;
  int n_x = 0, n_z = 0;
  double value = 0.0;
};

struct ConservationResult {
  std::vector<RefinementLevel> levels;
  double ratio = 0.0;
  double order = 0.0;
  bool pass() const {
    return !levels.empty() && levels[0].value <= limits::cons_residual && ratio >= limits::refinement_ratio;
  }
};
/// Max per-step conservation residual of a run at (dt, n_z) and (dt/2, 2 n_z - 1).
/// `u_shift` adds u_shift * (2z - z^2) on z > 0 to the initial temperature.
ConservationResult conservation(double t_end = 0.5, double u_shift = 0.0, int levels = 2);

struct MonotonicityResult {
  double max_increase = 0.0;    ///< max_j E_{j+1}/E_j - 1 over j >= 1
  double max_integrated = 0.0;  ///< max_t (E + 0.5 sum D dt)/E(0) - 1
  double E0 = 0.0;
  int steps = 0;
  bool pass() const {
    return max_increase <= limits::monotone_tol && max_integrated <= limits::integrated_tol;
  }
};
MonotonicityResult monotonicity(double epsilon = 1e-4, double t_end = 1.0);

struct DecayResult {
  DecayFit fit;
  double lambda1 = 0.0;  ///< dense oracle, k = 1
  double rel_error = 0.0;
  bool pass() const {
    return fit.status == FitStatus::ok && fit.r_squared >= limits::fit_r2 && rel_error <= limits::decay_rel;
  }
};
DecayResult decay(double t_end = 2.0, double epsilon = 0.0, int n_z_dense = 512);

struct EpsilonResult {
  std::vector<double> eps;
  /// distance(eps[i], eps[i+1]) relative to the eps[i+1] trajectory.
  std::vector<double> distance;
  bool pass() const {
    return distance.size() == 2 && distance[1] < distance[0] && distance[1] <= limits::eps_rel;
  }
};
/// sup_t sqrt(E_0(u_a - u_b, rho_a - rho_b; rho_b)) / sup_t sqrt(E_0(u_b, rho_b; rho_b)).
double epsilon_distance(const std::vector<Snapshot>& a, const std::vector<Snapshot>& b,
                        const Cutoff& cutoff);
EpsilonResult epsilon_continuation(std::vector<double> eps = {1e-2, 1e-4, 0.0}, double t_end = 1.0);

struct IdentityResult {
  std::vector<RefinementLevel> levels;
  std::vector<IdentityTerms> terms;
  double ratio = 0.0;
  bool pass() const { return ratio >= limits::refinement_ratio; }
};
/// Residual at the three-level window centred at t_mid of the decay-k1 run,
/// at (dt, n_x, n_z) and (dt/2, 2 n_x, 2 n_z - 1).
IdentityResult identity(double t_mid = 0.5, double epsilon = 0.0);

struct MmsResult {
  std::vector<RefinementLevel> time_levels, z_levels;
  double time_order = 0.0, z_order = 0.0;
  bool pass() const { return time_order >= limits::mms_time_order && z_order >= limits::mms_z_order; }
};
MmsResult mms(double epsilon = 0.0);

struct NormsResult {
  int cases = 0;
  double worst_low = 0.0;   ///< min over cases of ratio * C (>= 1 required)
  double worst_high = 0.0;  ///< max over cases of ratio / C (<= 1 required)
  double max_C = 0.0;
  bool pass() const { return cases > 0 && worst_low >= 1.0 && worst_high <= 1.0; }
};
NormsResult norm_equivalence(int count = 50, std::uint64_t seed = 7, int n_x = 32, int n_z = 33);

struct MeanResult {
  double mean_end = 0.0;
  double predicted = 0.0;
  double error = 0.0;
  bool pass() const { return error <= limits::mean_err; }
};
/// u0 = compatible + bump (2|z| - z^2), rho0 = 1e-3 sin x.
MeanResult mean_convergence(double t_end = 4.0, double bump = 0.02);

/// Observed order from two values at refinement factor 2.
double observed_order(double coarse, double fine);

}  // namespace stefan::studies
