/// @file errors.hpp
/// Exception types shared by the library and the command-line tool.
#pragma once

#include <stdexcept>
#include <string>

namespace stefan {

/// Invalid configuration value or unknown key. Maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A field contains NaN/Inf or has the wrong shape.
class InvalidField : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// 1 + phi'(z) rho(x) <= 0 somewhere on the grid.
class DegenerateTransform : public std::runtime_error {
 public:
  DegenerateTransform(int ix, int iz, double jacobian);
  int ix() const { return ix_; }
  int iz() const { return iz_; }
  double jacobian() const { return jacobian_; }

 private:
  int ix_;
  int iz_;
  double jacobian_;
};

/// Base class for failures inside a time step.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LinearSolveError : public SolverError {
 public:
  LinearSolveError(const std::string& what, double residual)
      : SolverError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class FixedPointError : public SolverError {
 public:
  FixedPointError(const std::string& what, int iterations, double ratio)
      : SolverError(what), iterations_(iterations), ratio_(ratio) {}
  int iterations() const { return iterations_; }
  /// Last observed contraction ratio |d_m| / |d_{m-1}|.
  double ratio() const { return ratio_; }

 private:
  int iterations_;
  double ratio_;
};

/// A time step failed inside run(); wraps the underlying diagnostic.
class StepFailure : public SolverError {
 public:
  StepFailure(const std::string& what, int step, double t) : SolverError(what), step_(step), t_(t) {}
  int step() const { return step_; }
  double t() const { return t_; }

 private:
  int step_;
  double t_;
};

}  // namespace stefan
