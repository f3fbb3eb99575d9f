#include "stefan/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stefan/errors.hpp"

namespace stefan::oracle {

namespace {
constexpr double pi = std::numbers::pi;

// The linearization drops a, B, c because they equal 1, 0, 0 about rho = 0.
void assert_flat_coefficients() {
  const Cutoff cut(0.25);
  for (double z : {-0.9, -0.5, -0.3, 0.0, 0.3, 0.5, 0.9}) {
    const PointCoefficients p = point_coefficients(z, 0.0, 0.0, 0.0, 0.0, cut);
    if (p.a != 1.0 || p.b != 0.0 || p.c != 0.0) {
      throw std::logic_error("flat-state coefficients are not (1, 0, 0)");
    }
  }
}
}  // namespace

PointCoefficients point_coefficients(double z, double rho, double rho_x, double rho_xx, double rho_t,
                                     const Cutoff& cutoff) {
  const CutoffValues c = cutoff(z);
  const double J = 1.0 + c.dphi * rho;
  const double N = 1.0 + c.phi * c.phi * rho_x * rho_x;
  PointCoefficients p;
  p.a = N / (J * J);
  p.b = 2.0 * c.phi * rho_x / J;
  const double d = c.phi * rho_xx / J - 2.0 * c.phi * c.dphi * rho_x * rho_x / (J * J) +
                   c.d2phi * rho * N / (J * J * J);
  const double e = -c.phi * rho_t / J;
  p.c = d + e;
  return p;
}

LinearizedMode linearized_spectrum(int k, int n_z_dense, double epsilon) {
  if (n_z_dense < 64 || n_z_dense % 2 != 0) {
    throw ConfigError("linearized_spectrum: n_z_dense must be even and >= 64");
  }
  if (k < 0) throw ConfigError("linearized_spectrum: k must be >= 0");
  if (epsilon < 0.0) throw ConfigError("linearized_spectrum: epsilon must be >= 0");
  assert_flat_coefficients();

  const int m = n_z_dense / 2;
  const double h = 1.0 / m;
  const double k2 = double(k) * k;
  const int dim = 2 * m + 1;
  const int ir = 2 * m;
  // Unknowns: upper nodes z = i h (i = 1..m) at i-1, lower nodes z = -i h at
  // m+i-1, interface coefficient rho last. The z = 0 value is -k^2 rho.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd M = Eigen::VectorXd::Ones(dim);
  const double h2 = h * h;
  for (int side = 0; side < 2; ++side) {
    const int off = side * m;
    for (int i = 1; i <= m; ++i) {
      const int r = off + i - 1;
      A(r, r) = -2.0 / h2 - k2;
      if (i == 1) {
        A(r, ir) += -k2 / h2;
      } else {
        A(r, r - 1) += 1.0 / h2;
      }
      if (i == m) {
        A(r, r - 1) += 1.0 / h2;  // mirror ghost at the wall
      } else {
        A(r, r + 1) += 1.0 / h2;
      }
    }
  }
  // Interface flux balance over the two half cells adjacent to z = 0.
  M(ir) = 1.0 + epsilon * k2 * k2 + h * k2;
  A(ir, 0) = -1.0 / h;
  A(ir, m) = -1.0 / h;
  A(ir, ir) = -2.0 * k2 / h - h * k2 * k2;
  for (int r = 0; r < dim; ++r) A.row(r) /= M(r);

  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw SolverError("linearized_spectrum: eigensolver failed");
  LinearizedMode out;
  out.k = k;
  out.matrix_dim = dim;
  const auto ev = es.eigenvalues();
  out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::stable_sort(out.eigenvalues.begin(), out.eigenvalues.end(),
                   [](const auto& a, const auto& b) { return a.real() > b.real(); });
  return out;
}

double continuum_rate(int k, double epsilon) {
  if (k < 1) throw ConfigError("continuum_rate: k must be >= 1");
  const double k2 = double(k) * k;
  const double g = 1.0 + epsilon * k2 * k2;
  auto f = [&](double lam) {
    const double q2 = k2 + lam;
    const double qt = q2 > 0 ? std::sqrt(q2) * std::tanh(std::sqrt(q2)) : 0.0;
    return lam * g + 2.0 * k2 * qt;
  };
  boost::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, -k2, 0.0, boost::math::tools::eps_tolerance<double>(52),
                                            iters);
  return 0.5 * (r.first + r.second);
}

// ---------------------------------------------------------------- manufactured

double ManufacturedSolution::u(double t, double x, double z) const {
  return std::exp(-t) * std::cos(pi * z) * (1.0 + au_ * std::cos(x));
}
double ManufacturedSolution::u_t(double t, double x, double z) const { return -u(t, x, z); }
double ManufacturedSolution::u_x(double t, double x, double z) const {
  return -au_ * std::exp(-t) * std::cos(pi * z) * std::sin(x);
}
double ManufacturedSolution::u_xx(double t, double x, double z) const {
  return -au_ * std::exp(-t) * std::cos(pi * z) * std::cos(x);
}
double ManufacturedSolution::u_z(double t, double x, double z) const {
  return -pi * std::exp(-t) * std::sin(pi * z) * (1.0 + au_ * std::cos(x));
}
double ManufacturedSolution::u_zz(double t, double x, double z) const { return -pi * pi * u(t, x, z); }
double ManufacturedSolution::u_xz(double t, double x, double z) const {
  return pi * au_ * std::exp(-t) * std::sin(pi * z) * std::sin(x);
}
double ManufacturedSolution::rho(double t, double x) const { return ar_ * std::exp(-t) * std::sin(x); }
double ManufacturedSolution::rho_x(double t, double x) const { return ar_ * std::exp(-t) * std::cos(x); }
double ManufacturedSolution::rho_xx(double t, double x) const { return -rho(t, x); }
double ManufacturedSolution::rho_t(double t, double x) const { return -rho(t, x); }
double ManufacturedSolution::rho_xxxxt(double t, double x) const { return -rho(t, x); }

ManufacturedForcing manufactured_forcing(const Manufactured& m, double t, const Grid& grid,
                                         const Cutoff& cutoff, double epsilon) {
  const int nx = grid.n_x(), nz = grid.n_z();
  ManufacturedForcing f{BulkField(nx, nz), InterfaceField(nx), InterfaceField(nx)};
  for (int i = 0; i < nx; ++i) {
    const double x = grid.x.node(i);
    const double r = m.rho(t, x), rx = m.rho_x(t, x), rxx = m.rho_xx(t, x), rt = m.rho_t(t, x);
    for (int j = 0; j < nz; ++j) {
      const double z = grid.z.node(j);
      const PointCoefficients p = point_coefficients(z, r, rx, rxx, rt, cutoff);
      const double L = m.u_xx(t, x, z) + p.a * m.u_zz(t, x, z) - p.b * m.u_xz(t, x, z) -
                       p.c * m.u_z(t, x, z);
      f.bulk(j, i) = m.u_t(t, x, z) - L;
    }
    const double br2 = 1.0 + rx * rx;
    const double kappa = rxx / (br2 * std::sqrt(br2));
    f.dirichlet[i] = m.u(t, x, 0.0) - kappa;
    const double jump = m.u_z(t, x, -0.0) - m.u_z(t, x, 0.0);
    f.jump[i] = rt + epsilon * m.rho_xxxxt(t, x) - br2 * jump;
  }
  return f;
}

BulkField manufactured_u(const Manufactured& m, double t, const Grid& grid) {
  return BulkField::sample(grid, [&](double x, double z) { return m.u(t, x, z); });
}

InterfaceField manufactured_rho(const Manufactured& m, double t, const TangentialGrid& grid) {
  return InterfaceField::sample(grid, [&](double x) { return m.rho(t, x); });
}

InterfaceField curvature_closed_form(double delta, int k, int n_x) {
  const TangentialGrid g(n_x);
  return InterfaceField::sample(g, [&](double x) {
    const double c = std::cos(k * x);
    const double q = 1.0 + delta * delta * k * k * c * c;
    return -delta * k * k * std::sin(k * x) / (q * std::sqrt(q));
  });
}

}  // namespace stefan::oracle
