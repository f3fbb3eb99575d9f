/// @file identity.hpp
/// Residual of the k = 0 energy identity for the model problem
///
///   U_t - U_xx - a_psi U_zz = f                      in the bulk
///   U = chi_xx <psi>^-1 - psi_x^2 chi_xx <psi>^-3 + G  on z = 0
///   U_z = 0                                          on z = +-1
///   [U_z] = (omega_t + eps omega_xxxxt) <psi>^-2 + h on z = 0
///
/// which reads
///   d/dt E(U, omega; psi) + D(U, omega; psi) + int (U_x^2 + a U_z^2)
///     = int_bulk (2P + R) - int_interface (2Q + S + T).
/// Time derivatives use centred differences over three consecutive levels.
#pragma once

#include <array>
#include <optional>
#include <span>

#include "stefan/energy.hpp"
#include "stefan/fields.hpp"
#include "stefan/hanzawa.hpp"

namespace stefan {

struct IdentityLevel {
  double t = 0.0;
  BulkField U;
  InterfaceField omega;
  InterfaceField chi;
  InterfaceField psi;
  InterfaceField G;
};

struct IdentityInputs {
  std::array<IdentityLevel, 3> level;
  /// Bulk source at the middle level; the two copies differ only on z = 0.
  BulkField f_above;
  BulkField f_below;
  /// Jump source at the middle level.
  InterfaceField h;
  double epsilon = 0.0;
};

struct IdentityTerms {
  double dEdt = 0, D = 0, extra = 0, lhs = 0;
  double P = 0, R = 0, Q = 0, S = 0, T = 0, A = 0, B = 0, rhs = 0;
  /// |lhs - rhs| over the sum of the magnitudes of all terms (plus floor).
  double residual = 0;
  /// |lhs - rhs| / (|lhs| + |rhs| + floor). Near 1 whenever lhs and rhs are
  /// both below the discretization error of their constituent terms.
  double lhs_rhs_residual = 0;
  /// max |.| of the pointwise terms carrying a factor (chi - omega).
  double cross_max = 0;
};

/// Evaluates all terms; floor = 1e-14 * n_x * n_z.
IdentityTerms identity_terms(const IdentityInputs& in, const Cutoff& cutoff, bool include_B = true);

/// Instantiation on a converged trajectory: U = u, omega = chi = psi = rho,
/// f = -B u_xz - c u_z, G = 0, h = 0. Uses the last three entries of the
/// window; returns nothing if fewer than three are available. Throws
/// std::logic_error if a cross term is not exactly zero.
std::optional<IdentityTerms> identity_residual_k0(std::span<const Snapshot> window, double epsilon,
                                                  const Cutoff& cutoff, bool include_B = true);

}  // namespace stefan
