#include "stefan/kernels.hpp"

#include <Eigen/Dense>

#include <stdexcept>

#include "stefan/errors.hpp"

namespace stefan::kernels {

ModalField forward_rows(const BulkField& f, Exec exec) {
  const Fourier& ft = fourier(f.n_x());
  ModalField out(ft.modes(), f.n_z());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (int j = 0; j < f.n_z(); ++j) ft.forward(f.row(j), out.row(j));
  return out;
}

BulkField inverse_rows(const ModalField& f, int n_x, Exec exec) {
  const Fourier& ft = fourier(n_x);
  if (ft.modes() != f.modes()) throw InvalidField("inverse_rows: mode count mismatch");
  BulkField out(n_x, f.n_z());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (int j = 0; j < f.n_z(); ++j) ft.inverse(f.row(j), out.row(j));
  return out;
}

namespace {

void check_problem(const ModeProblem& p) {
  if (p.n_z < 5 || p.n_z % 2 == 0) throw std::invalid_argument("ModeProblem: bad n_z");
  if (static_cast<int>(p.a_ref.size()) != p.n_z || p.rhs.n_z() != p.n_z) {
    throw std::invalid_argument("ModeProblem: size mismatch");
  }
  const int nm = p.rhs.modes();
  if (static_cast<int>(p.dirichlet.size()) != nm) throw std::invalid_argument("ModeProblem: dirichlet size");
  if (p.coupled && (static_cast<int>(p.rho_pred.size()) != nm || static_cast<int>(p.rho_gain.size()) != nm)) {
    throw std::invalid_argument("ModeProblem: coupling size");
  }
}

// Thomas algorithm; sub[0] and sup[n-1] are ignored. Overwrites x with the solution.
template <class T>
void thomas(const std::vector<double>& sub, const std::vector<double>& diag,
            const std::vector<double>& sup, std::vector<T>& x, std::vector<double>& work) {
  const int n = static_cast<int>(diag.size());
  work.resize(n);
  double beta = diag[0];
  x[0] /= beta;
  for (int i = 1; i < n; ++i) {
    work[i] = sup[i - 1] / beta;
    beta = diag[i] - sub[i] * work[i];
    x[i] = (x[i] - sub[i] * x[i - 1]) / beta;
  }
  for (int i = n - 2; i >= 0; --i) x[i] -= work[i + 1] * x[i + 1];
}

}  // namespace

ModeSolution solve_modes(const ModeProblem& p, Exec exec) {
  check_problem(p);
  const int nz = p.n_z;
  const int nm = p.rhs.modes();
  const int c = (nz - 1) / 2;
  const double ih2 = 1.0 / (p.dz * p.dz);
  ModeSolution sol{ModalField(nm, nz), {}};
  if (p.coupled) sol.rho.assign(nm, 0.0);

#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::parallel)
  for (int k = 0; k < nm; ++k) {
    const double beta = p.mass + p.theta * double(k) * double(k);
    std::vector<double> sub(c), diag(c), sup(c), work;
    std::vector<cplx> lo(c), hi(c);
    std::vector<double> lo1(c, 0.0), hi1(c, 0.0);

    // Lower half: unknowns j = 0..c-1, wall at j = 0.
    for (int m = 0; m < c; ++m) {
      const double g = p.theta * p.a_ref[m] * ih2;
      diag[m] = beta + 2.0 * g;
      sub[m] = -g;
      sup[m] = (m == 0) ? -2.0 * g : -g;
      lo[m] = p.rhs(m, k);
    }
    const double g_lo = p.theta * p.a_ref[c - 1] * ih2;
    lo1[c - 1] = g_lo;
    thomas(sub, diag, sup, lo, work);
    thomas(sub, diag, sup, lo1, work);

    // Upper half: unknowns j = c+1..nz-1, local m = j - c - 1, wall at the end.
    for (int m = 0; m < c; ++m) {
      const int j = c + 1 + m;
      const double g = p.theta * p.a_ref[j] * ih2;
      diag[m] = beta + 2.0 * g;
      sub[m] = (m == c - 1) ? -2.0 * g : -g;
      sup[m] = -g;
      hi[m] = p.rhs(j, k);
    }
    const double g_hi = p.theta * p.a_ref[c + 1] * ih2;
    hi1[0] = g_hi;
    thomas(sub, diag, sup, hi, work);
    thomas(sub, diag, sup, hi1, work);

    // J(u) = (6 s - 4 u_{c-1} + u_{c-2} - 4 u_{c+1} + u_{c+2}) / (2h), linear in s.
    const double i2h = 1.0 / (2.0 * p.dz);
    const cplx J0 = (-4.0 * lo[c - 1] + lo[c - 2] - 4.0 * hi[0] + hi[1]) * i2h;
    const double J1 = (6.0 - 4.0 * lo1[c - 1] + lo1[c - 2] - 4.0 * hi1[0] + hi1[1]) * i2h;

    cplx s;
    if (p.coupled) {
      const double k2 = double(k) * double(k);
      const double Q = p.rho_gain[k];
      s = (p.dirichlet[k] - k2 * (p.rho_pred[k] + Q * J0)) / (1.0 + k2 * Q * J1);
      sol.rho[k] = p.rho_pred[k] + Q * (J0 + s * J1);
    } else {
      s = p.dirichlet[k];
    }
    for (int m = 0; m < c; ++m) {
      sol.u(m, k) = lo[m] + s * lo1[m];
      sol.u(c + 1 + m, k) = hi[m] + s * hi1[m];
    }
    sol.u(c, k) = s;
  }
  return sol;
}

ModeSolution solve_modes_reference(const ModeProblem& p) {
  check_problem(p);
  const int nz = p.n_z;
  const int nm = p.rhs.modes();
  const int c = (nz - 1) / 2;
  const double ih2 = 1.0 / (p.dz * p.dz);
  const int n = p.coupled ? nz + 1 : nz;
  ModeSolution sol{ModalField(nm, nz), {}};
  if (p.coupled) sol.rho.assign(nm, 0.0);

  for (int k = 0; k < nm; ++k) {
    const double k2 = double(k) * double(k);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd r = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j < nz; ++j) {
      if (j == c) continue;
      const double g = p.theta * p.a_ref[j] * ih2;
      A(j, j) = p.mass + p.theta * k2 + 2.0 * g;
      if (j == 0) {
        A(j, 1) = -2.0 * g;
      } else if (j == nz - 1) {
        A(j, nz - 2) = -2.0 * g;
      } else {
        A(j, j - 1) = -g;
        A(j, j + 1) = -g;
      }
      r(j) = p.rhs(j, k);
    }
    A(c, c) = 1.0;
    r(c) = p.dirichlet[k];
    if (p.coupled) {
      const int ir = nz;
      A(c, ir) = k2;
      const double w = p.rho_gain[k] / (2.0 * p.dz);
      A(ir, ir) = 1.0;
      A(ir, c) = -6.0 * w;
      A(ir, c - 1) = 4.0 * w;
      A(ir, c - 2) = -1.0 * w;
      A(ir, c + 1) = 4.0 * w;
      A(ir, c + 2) = -1.0 * w;
      r(ir) = p.rho_pred[k];
    }
    const Eigen::VectorXcd x = A.partialPivLu().solve(r);
    for (int j = 0; j < nz; ++j) sol.u(j, k) = x(j);
    if (p.coupled) sol.rho[k] = x(nz);
  }
  return sol;
}

BulkField apply_operator(const BulkField& u, const BulkField& a, const BulkField& b,
                         const BulkField& c, bool with_uxx, Exec exec) {
  const int nx = u.n_x();
  const int nz = u.n_z();
  if (!u.same_shape(a) || !u.same_shape(b) || !u.same_shape(c)) {
    throw InvalidField("apply_operator: shape mismatch");
  }
  const int ic = (nz - 1) / 2;
  const double h = 2.0 / (nz - 1);
  BulkField d1(nx, nz);
  BulkField d2(nx, nz);
  for (int j = 0; j < nz; ++j) {
    if (j == ic) continue;
    for (int i = 0; i < nx; ++i) {
      if (j == 0) {
        d2(j, i) = 2.0 * (u(1, i) - u(0, i)) / (h * h);
      } else if (j == nz - 1) {
        d2(j, i) = 2.0 * (u(nz - 2, i) - u(nz - 1, i)) / (h * h);
      } else {
        d1(j, i) = (u(j + 1, i) - u(j - 1, i)) / (2.0 * h);
        d2(j, i) = (u(j + 1, i) - 2.0 * u(j, i) + u(j - 1, i)) / (h * h);
      }
    }
  }
  const Fourier& ft = fourier(nx);
  BulkField out(nx, nz);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (int j = 0; j < nz; ++j) {
    if (j == ic) continue;
    std::vector<cplx> cu(ft.modes()), cd(ft.modes());
    ft.forward(u.row(j), cu);
    ft.forward(d1.row(j), cd);
    for (int k = 0; k < ft.modes(); ++k) {
      cu[k] *= with_uxx ? -double(k) * double(k) : 0.0;
      cd[k] *= cplx(0.0, double(k));
    }
    cd[ft.modes() - 1] = 0.0;
    std::vector<double> uxx(nx), d1x(nx);
    ft.inverse(cu, uxx);
    ft.inverse(cd, d1x);
    for (int i = 0; i < nx; ++i) {
      out(j, i) = uxx[i] + a(j, i) * d2(j, i) - b(j, i) * d1x[i] - c(j, i) * d1(j, i);
    }
  }
  return out;
}

}  // namespace stefan::kernels
