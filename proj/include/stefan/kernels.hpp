/// @file kernels.hpp
/// Data-parallel kernels used inside a time step, each with an execution
/// switch. `solve_modes_reference` is a serial dense solver kept to check the
/// fast per-mode solver.
#pragma once

#include <vector>

#include "stefan/fields.hpp"
#include "stefan/spectral.hpp"

namespace stefan::kernels {

enum class Exec { serial, parallel };

/// Row-wise Fourier coefficients of a bulk field: (n_z) x (n_x/2 + 1).
class ModalField {
 public:
  ModalField() = default;
  ModalField(int n_modes, int n_z) : nm_(n_modes), nz_(n_z), v_(static_cast<std::size_t>(n_modes) * n_z) {}
  int modes() const { return nm_; }
  int n_z() const { return nz_; }
  cplx& operator()(int iz, int k) { return v_[static_cast<std::size_t>(iz) * nm_ + k]; }
  cplx operator()(int iz, int k) const { return v_[static_cast<std::size_t>(iz) * nm_ + k]; }
  std::span<cplx> row(int iz) { return {v_.data() + static_cast<std::size_t>(iz) * nm_, static_cast<std::size_t>(nm_)}; }
  std::span<const cplx> row(int iz) const {
    return {v_.data() + static_cast<std::size_t>(iz) * nm_, static_cast<std::size_t>(nm_)};
  }

 private:
  int nm_ = 0;
  int nz_ = 0;
  std::vector<cplx> v_;
};

ModalField forward_rows(const BulkField& f, Exec exec = Exec::parallel);
BulkField inverse_rows(const ModalField& f, int n_x, Exec exec = Exec::parallel);

/// Per-mode implicit problem. For every tangential mode k and every row
/// z_j != 0:
///   (mass + theta k^2) u_j - theta abar_j D2 u_j = rhs_j
/// with the wall ghost u_{-1} = u_1 (homogeneous Neumann). The z = 0 value s
/// is either prescribed (`dirichlet`) or, when `coupled`, determined with the
/// interface coefficient rho through
///   s = dirichlet_k - k^2 rho,   rho = rho_pred_k + rho_gain_k * J(u),
/// where J is the one-sided normal-derivative jump at z = 0.
struct ModeProblem {
  int n_z = 0;
  double dz = 0.0;
  double mass = 0.0;
  double theta = 1.0;
  std::vector<double> a_ref;
  ModalField rhs;
  std::vector<cplx> dirichlet;
  bool coupled = false;
  std::vector<cplx> rho_pred;
  std::vector<double> rho_gain;
};

struct ModeSolution {
  ModalField u;
  std::vector<cplx> rho;  ///< empty unless coupled
};

/// Tridiagonal solves on each half plus superposition in the z = 0 value.
ModeSolution solve_modes(const ModeProblem& p, Exec exec = Exec::parallel);
/// Dense LU of the full bordered system, one mode at a time.
ModeSolution solve_modes_reference(const ModeProblem& p);

/// Discrete transformed heat operator
///   u_xx + a D2 u - b (D1 u)_x - c D1 u
/// on rows z != 0 (the z = 0 row is returned as zero). D1/D2 are centred
/// differences with the Neumann ghost at the walls. With `with_uxx` false the
/// u_xx term is omitted.
BulkField apply_operator(const BulkField& u, const BulkField& a, const BulkField& b,
                         const BulkField& c, bool with_uxx = true, Exec exec = Exec::parallel);

}  // namespace stefan::kernels
