/// @file config.hpp
/// Scenario files (INI with sections) and initial-data construction.
///
/// Sections and keys:
///   [scenario]  name, t_end, initial (flat|modes|random|file), rho_mean,
///               rho_sin, rho_cos ("k:amp,k:amp"), random_amplitude,
///               u_init (compatible|zero|file), u_bump, u_file, rho_file,
///               resume (checkpoint directory)
///   [solver]    epsilon, dt, n_x, n_z, fp_tol, fp_max_iter, lin_tol,
///               lin_max_iter, alpha, k_diag, theta, scheme, dt_retries,
///               consistency_tol
///   [output]    dir, sample_every, identity, diagnostics, checkpoint_every
///   [sweep]     epsilon, dt, n_x, n_z (comma lists), job_cap
///   [spectrum]  k_min, k_max, epsilon (list), n_z_dense, n_eigs
/// Unknown sections or keys are errors.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "stefan/solver.hpp"

namespace stefan {

enum class InitialKind { flat, modes, random, file };
enum class TemperatureInit { compatible, zero, file };

struct SweepAxes {
  std::vector<double> epsilon;
  std::vector<double> dt;
  std::vector<int> n_x;
  std::vector<int> n_z;
  int job_cap = 64;
  bool present = false;
  std::size_t size() const;
};

struct SpectrumSpec {
  int k_min = 0;
  int k_max = 8;
  std::vector<double> epsilon{0.0};
  int n_z_dense = 256;
  int n_eigs = 4;
};

struct Scenario {
  std::string name = "scenario";
  double t_end = 1.0;
  InitialKind initial = InitialKind::modes;
  double rho_mean = 0.0;
  std::vector<std::pair<int, double>> rho_sin;
  std::vector<std::pair<int, double>> rho_cos;
  double random_amplitude = 1e-3;
  TemperatureInit u_init = TemperatureInit::compatible;
  /// Adds u_bump * (2|z| - z^2) to the initial temperature.
  double u_bump = 0.0;
  std::filesystem::path u_file, rho_file, resume;

  SolverConfig solver;

  std::filesystem::path out_dir = "out";
  int sample_every = 0;
  bool identity = true;
  bool diagnostics = true;
  int checkpoint_every = 0;

  SweepAxes sweep;
  SpectrumSpec spectrum;

  /// Raw file text, hashed into the output headers.
  std::string source;
};

/// Throws ConfigError on syntax errors, unknown keys and invalid values.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Band-limited random interface field: modes 1 <= k < n_x/3 with
/// coefficients drawn uniformly and damped like 1/k^2, rescaled to max
/// |value| = amplitude. The top third of the spectrum is exactly zero.
InterfaceField random_band_limited(int n_x, double amplitude, std::mt19937_64& rng);

/// Initial state for the scenario; `seed` drives the random kind.
State initial_state(const Scenario& sc, std::uint64_t seed);

}  // namespace stefan
