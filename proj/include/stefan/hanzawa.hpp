/// @file hanzawa.hpp
/// Cutoff profile, transformed-operator coefficients, curvature and the
/// normal-derivative jump across z = 0.
#pragma once

#include "stefan/fields.hpp"

namespace stefan {

struct CutoffValues {
  double phi;
  double dphi;
  double d2phi;
};

/// Even C^2 cutoff: phi = 1 on |z| < alpha, 0 on |z| > 1 - alpha, quintic
/// smoothstep in between.
class Cutoff {
 public:
  explicit Cutoff(double alpha = 0.25);
  double alpha() const { return alpha_; }
  CutoffValues operator()(double z) const;
  /// max |phi'|.
  double max_slope() const;

 private:
  double alpha_;
};

/// Coefficients of the transformed heat operator
///   u_t - u_xx - a u_zz + B u_xz + c u_z
/// at every grid node, with c = d + e.
struct TransformCoefficients {
  BulkField a;
  BulkField a_z;  ///< d a / d z, analytic in phi.
  BulkField b;
  BulkField c;
  BulkField d;
  BulkField e;
  /// 1 + phi'(z) rho(x); strictly positive.
  BulkField jacobian;
};

/// Throws DegenerateTransform (naming the first offending node) when
/// 1 + phi' rho <= 0.
TransformCoefficients coefficients(const InterfaceField& rho, const InterfaceField& rho_t,
                                   const Cutoff& cutoff, const NormalGrid& zgrid);

/// <rho> = sqrt(1 + rho_x^2).
InterfaceField bracket(const InterfaceField& rho);

/// Mean curvature of the graph, computed in divergence form
/// d/dx (rho_x / <rho>). Warns (once) if rho is under-resolved.
InterfaceField curvature(const InterfaceField& rho);
/// Same quantity in expanded form rho_xx <rho>^-1 - rho_x^2 rho_xx <rho>^-3.
InterfaceField curvature_expanded(const InterfaceField& rho);

/// [u_z] = u_z(0-) - u_z(0+), one-sided second-order stencils.
InterfaceField jump_un(const BulkField& u);

}  // namespace stefan
