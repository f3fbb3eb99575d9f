/// @file oracle.hpp
/// Reference evaluators used to check the solver: the linearized spectrum of
/// the flat state, manufactured solutions with their forcing, and closed-form
/// curvature. Nothing here calls into the solver or the energy code; only the
/// cutoff profile and the field containers are shared.
#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "stefan/fields.hpp"
#include "stefan/hanzawa.hpp"

namespace stefan::oracle {

struct LinearizedMode {
  int k = 0;
  int matrix_dim = 0;
  /// Sorted by real part, largest first.
  std::vector<std::complex<double>> eigenvalues;
};

/// Spectrum of the flat state linearized about rho = 0 for wavenumber k:
///   lambda u = u_zz - k^2 u on (-1,0) u (0,1),  u(0) = -k^2 rho,
///   u_z(+-1) = 0,  (1 + eps k^4) lambda rho = u_z(0-) - u_z(0+),
/// discretized with n_z_dense cells in z (finite volumes with half cells at
/// z = 0 and at the walls) and solved densely. Requires n_z_dense >= 64, even.
LinearizedMode linearized_spectrum(int k, int n_z_dense, double epsilon);

/// Leading root of the continuum dispersion relation
///   lambda (1 + eps k^4) = -2 k^2 q tanh q,  q^2 = k^2 + lambda,  k >= 1.
double continuum_rate(int k, double epsilon);

/// Closed-form field family with all derivatives needed for the forcing.
class Manufactured {
 public:
  virtual ~Manufactured() = default;
  // Temperature and derivatives at (t, x, z).
  virtual double u(double t, double x, double z) const = 0;
  virtual double u_t(double t, double x, double z) const = 0;
  virtual double u_x(double t, double x, double z) const = 0;
  virtual double u_xx(double t, double x, double z) const = 0;
  virtual double u_z(double t, double x, double z) const = 0;
  virtual double u_zz(double t, double x, double z) const = 0;
  virtual double u_xz(double t, double x, double z) const = 0;
  // Interface and derivatives at (t, x).
  virtual double rho(double t, double x) const = 0;
  virtual double rho_x(double t, double x) const = 0;
  virtual double rho_xx(double t, double x) const = 0;
  virtual double rho_t(double t, double x) const = 0;
  virtual double rho_xxxxt(double t, double x) const = 0;
};

/// u* = e^{-t} cos(pi z) (1 + a_u cos x),  rho* = a_rho e^{-t} sin x.
class ManufacturedSolution final : public Manufactured {
 public:
  explicit ManufacturedSolution(double a_u = 0.1, double a_rho = 0.05) : au_(a_u), ar_(a_rho) {}
  double u(double t, double x, double z) const override;
  double u_t(double t, double x, double z) const override;
  double u_x(double t, double x, double z) const override;
  double u_xx(double t, double x, double z) const override;
  double u_z(double t, double x, double z) const override;
  double u_zz(double t, double x, double z) const override;
  double u_xz(double t, double x, double z) const override;
  double rho(double t, double x) const override;
  double rho_x(double t, double x) const override;
  double rho_xx(double t, double x) const override;
  double rho_t(double t, double x) const override;
  double rho_xxxxt(double t, double x) const override;

 private:
  double au_, ar_;
};

struct ManufacturedForcing {
  BulkField bulk;
  InterfaceField dirichlet;
  InterfaceField jump;
};

/// Source terms that make (u*, rho*) an exact solution of
///   u_t = u_xx + a u_zz - B u_xz - c u_z + F_bulk,
///   u(., 0) = kappa(rho) + g,
///   rho_t + eps rho_xxxxt = <rho>^2 [u_z] + F_jump.
/// The transform coefficients are evaluated from their closed forms.
ManufacturedForcing manufactured_forcing(const Manufactured& m, double t, const Grid& grid,
                                         const Cutoff& cutoff, double epsilon);

/// Samples of u*(t) and rho*(t) on the grid.
BulkField manufactured_u(const Manufactured& m, double t, const Grid& grid);
InterfaceField manufactured_rho(const Manufactured& m, double t, const TangentialGrid& grid);

/// Exact curvature of rho = delta sin(k x) on n_x nodes.
InterfaceField curvature_closed_form(double delta, int k, int n_x);

/// Closed-form transform coefficients at one point (rho and its derivatives given).
struct PointCoefficients {
  double a, b, c;
};
PointCoefficients point_coefficients(double z, double rho, double rho_x, double rho_xx, double rho_t,
                                     const Cutoff& cutoff);

}  // namespace stefan::oracle
