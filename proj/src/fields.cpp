#include "stefan/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stefan/errors.hpp"
#include "stefan/spectral.hpp"

namespace stefan {

TangentialGrid::TangentialGrid(int n_x) : n_(n_x) {
  if (n_x < 8 || n_x % 2 != 0) {
    throw ConfigError("n_x must be even and >= 8, got " + std::to_string(n_x));
  }
}

double TangentialGrid::spacing() const { return 2.0 * std::numbers::pi / n_; }
double TangentialGrid::length() const { return 2.0 * std::numbers::pi; }

NormalGrid::NormalGrid(int n_z) : n_(n_z) {
  if (n_z < 5 || n_z % 2 == 0) {
    throw ConfigError("n_z must be odd and >= 5, got " + std::to_string(n_z));
  }
}

// ---------------------------------------------------------------- InterfaceField

InterfaceField::InterfaceField(int n_x, double fill) : v_(n_x, fill) {}
InterfaceField::InterfaceField(std::vector<double> values) : v_(std::move(values)) {}

InterfaceField InterfaceField::sample(const TangentialGrid& grid,
                                      const std::function<double(double)>& f) {
  InterfaceField out(grid.size());
  for (int i = 0; i < grid.size(); ++i) out[i] = f(grid.node(i));
  return out;
}

double InterfaceField::mean() const {
  double s = 0.0;
  for (double v : v_) s += v;
  return v_.empty() ? 0.0 : s / v_.size();
}

double InterfaceField::max_abs() const {
  double m = 0.0;
  for (double v : v_) m = std::max(m, std::abs(v));
  return m;
}

bool InterfaceField::finite() const {
  return std::all_of(v_.begin(), v_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

template <class F>
void check_same(const F& a, const F& b, const char* op) {
  if (a.values().size() != b.values().size()) {
    throw InvalidField(std::string("shape mismatch in ") + op);
  }
}

}  // namespace

InterfaceField& InterfaceField::operator+=(const InterfaceField& o) {
  check_same(*this, o, "InterfaceField +=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

InterfaceField& InterfaceField::operator-=(const InterfaceField& o) {
  check_same(*this, o, "InterfaceField -=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

InterfaceField& InterfaceField::operator*=(double s) {
  for (double& v : v_) v *= s;
  return *this;
}

InterfaceField operator+(InterfaceField a, const InterfaceField& b) { return a += b; }
InterfaceField operator-(InterfaceField a, const InterfaceField& b) { return a -= b; }
InterfaceField operator*(double s, InterfaceField a) { return a *= s; }

InterfaceField operator*(const InterfaceField& a, const InterfaceField& b) {
  check_same(a, b, "InterfaceField *");
  InterfaceField out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

// ---------------------------------------------------------------- BulkField

BulkField::BulkField(int n_x, int n_z, double fill)
    : nx_(n_x), nz_(n_z), v_(static_cast<std::size_t>(n_x) * n_z, fill) {}

BulkField BulkField::sample(const Grid& grid, const std::function<double(double, double)>& f) {
  BulkField out(grid.n_x(), grid.n_z());
  for (int j = 0; j < grid.n_z(); ++j) {
    const double z = grid.z.node(j);
    for (int i = 0; i < grid.n_x(); ++i) out(j, i) = f(grid.x.node(i), z);
  }
  return out;
}

InterfaceField BulkField::row_field(int iz) const {
  auto r = row(iz);
  return InterfaceField(std::vector<double>(r.begin(), r.end()));
}

void BulkField::set_row(int iz, const InterfaceField& f) {
  if (f.size() != nx_) throw InvalidField("set_row: size mismatch");
  std::copy(f.values().begin(), f.values().end(), row(iz).begin());
}

double BulkField::max_abs() const {
  double m = 0.0;
  for (double v : v_) m = std::max(m, std::abs(v));
  return m;
}

bool BulkField::finite() const {
  return std::all_of(v_.begin(), v_.end(), [](double v) { return std::isfinite(v); });
}

BulkField& BulkField::operator+=(const BulkField& o) {
  if (!same_shape(o)) throw InvalidField("shape mismatch in BulkField +=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

BulkField& BulkField::operator-=(const BulkField& o) {
  if (!same_shape(o)) throw InvalidField("shape mismatch in BulkField -=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

BulkField& BulkField::operator*=(double s) {
  for (double& v : v_) v *= s;
  return *this;
}

BulkField operator+(BulkField a, const BulkField& b) { return a += b; }
BulkField operator-(BulkField a, const BulkField& b) { return a -= b; }
BulkField operator*(double s, BulkField a) { return a *= s; }

BulkField operator*(const BulkField& a, const BulkField& b) {
  if (!a.same_shape(b)) throw InvalidField("shape mismatch in BulkField *");
  BulkField out(a.n_x(), a.n_z());
  auto o = out.values();
  auto x = a.values();
  auto y = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] * y[i];
  return out;
}

void require_finite(const InterfaceField& f, const char* where) {
  if (!f.finite()) throw InvalidField(std::string(where) + ": non-finite interface value");
}

void require_finite(const BulkField& f, const char* where) {
  if (!f.finite()) throw InvalidField(std::string(where) + ": non-finite bulk value");
}

// ---------------------------------------------------------------- derivatives

namespace {

void spectral_derivative(std::span<const double> in, std::span<double> out, int order) {
  const int n = static_cast<int>(in.size());
  const Fourier& ft = fourier(n);
  std::vector<cplx> c(ft.modes());
  ft.forward(in, c);
  const cplx i_unit(0.0, 1.0);
  for (int k = 0; k < ft.modes(); ++k) {
    cplx m = 1.0;
    for (int p = 0; p < order; ++p) m *= i_unit * static_cast<double>(k);
    c[k] *= m;
  }
  if (order % 2 == 1) c[n / 2] = 0.0;
  ft.inverse(c, out);
}

}  // namespace

InterfaceField d_tangential(const InterfaceField& f, int order) {
  if (order < 0) throw std::invalid_argument("d_tangential: negative order");
  require_finite(f, "d_tangential");
  if (order == 0) return f;
  InterfaceField out(f.size());
  spectral_derivative(f.values(), out.values(), order);
  return out;
}

BulkField d_tangential(const BulkField& f, int order) {
  if (order < 0) throw std::invalid_argument("d_tangential: negative order");
  require_finite(f, "d_tangential");
  if (order == 0) return f;
  BulkField out(f.n_x(), f.n_z());
#pragma omp parallel for schedule(static)
  for (int j = 0; j < f.n_z(); ++j) spectral_derivative(f.row(j), out.row(j), order);
  return out;
}

BulkField d_normal(const BulkField& f, Side side) {
  const int nz = f.n_z();
  const int nx = f.n_x();
  if (nz < 5) throw InvalidField("d_normal requires n_z >= 5");
  const double h = NormalGrid(nz).spacing();
  const int c = (nz - 1) / 2;
  const double s = 1.0 / (2.0 * h);
  BulkField out(nx, nz);
  for (int i = 0; i < nx; ++i) {
    out(0, i) = (-3.0 * f(0, i) + 4.0 * f(1, i) - f(2, i)) * s;
    out(nz - 1, i) = (3.0 * f(nz - 1, i) - 4.0 * f(nz - 2, i) + f(nz - 3, i)) * s;
  }
  for (int j = 1; j < nz - 1; ++j) {
    if (j == c) continue;
    for (int i = 0; i < nx; ++i) out(j, i) = (f(j + 1, i) - f(j - 1, i)) * s;
  }
  for (int i = 0; i < nx; ++i) {
    switch (side) {
      case Side::above:
        out(c, i) = (-3.0 * f(c, i) + 4.0 * f(c + 1, i) - f(c + 2, i)) * s;
        break;
      case Side::below:
        out(c, i) = (3.0 * f(c, i) - 4.0 * f(c - 1, i) + f(c - 2, i)) * s;
        break;
      case Side::centered:
        out(c, i) = (f(c + 1, i) - f(c - 1, i)) * s;
        break;
    }
  }
  return out;
}

BulkField d_normal2(const BulkField& f, Side side) {
  const int nz = f.n_z();
  const int nx = f.n_x();
  if (nz < 7) throw InvalidField("d_normal2 requires n_z >= 7");
  const double h = NormalGrid(nz).spacing();
  const int c = (nz - 1) / 2;
  const double s = 1.0 / (h * h);
  BulkField out(nx, nz);
  for (int i = 0; i < nx; ++i) {
    out(0, i) = (2.0 * f(0, i) - 5.0 * f(1, i) + 4.0 * f(2, i) - f(3, i)) * s;
    out(nz - 1, i) =
        (2.0 * f(nz - 1, i) - 5.0 * f(nz - 2, i) + 4.0 * f(nz - 3, i) - f(nz - 4, i)) * s;
  }
  for (int j = 1; j < nz - 1; ++j) {
    if (j == c) continue;
    for (int i = 0; i < nx; ++i) out(j, i) = (f(j + 1, i) - 2.0 * f(j, i) + f(j - 1, i)) * s;
  }
  for (int i = 0; i < nx; ++i) {
    switch (side) {
      case Side::above:
        out(c, i) = (2.0 * f(c, i) - 5.0 * f(c + 1, i) + 4.0 * f(c + 2, i) - f(c + 3, i)) * s;
        break;
      case Side::below:
        out(c, i) = (2.0 * f(c, i) - 5.0 * f(c - 1, i) + 4.0 * f(c - 2, i) - f(c - 3, i)) * s;
        break;
      case Side::centered:
        out(c, i) = (f(c + 1, i) - 2.0 * f(c, i) + f(c - 1, i)) * s;
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------- quadrature

double integrate(const InterfaceField& f) {
  require_finite(f, "integrate");
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * (2.0 * std::numbers::pi / f.size());
}

namespace {

double row_sum(std::span<const double> r) {
  double s = 0.0;
  for (double v : r) s += v;
  return s;
}

}  // namespace

double integrate(const BulkField& f) { return integrate_split(f, f); }

double integrate_split(const BulkField& above, const BulkField& below) {
  if (!above.same_shape(below)) throw InvalidField("integrate_split: shape mismatch");
  require_finite(above, "integrate");
  require_finite(below, "integrate");
  const int nz = above.n_z();
  const int c = (nz - 1) / 2;
  const double hz = 2.0 / (nz - 1);
  const double hx = 2.0 * std::numbers::pi / above.n_x();
  double s = 0.0;
  for (int j = 0; j <= c; ++j) {
    const double w = (j == 0 || j == c) ? 0.5 : 1.0;
    s += w * row_sum(below.row(j));
  }
  for (int j = c; j < nz; ++j) {
    const double w = (j == c || j == nz - 1) ? 0.5 : 1.0;
    s += w * row_sum(above.row(j));
  }
  return s * hz * hx;
}

double spectral_tail_fraction(const InterfaceField& f) {
  require_finite(f, "spectral_tail_fraction");
  const Fourier& ft = fourier(f.size());
  auto c = ft.forward(f.values());
  const int kmax = ft.modes() - 1;
  double total = 0.0;
  double tail = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    const double e = std::norm(c[k]);
    total += e;
    if (3 * k > 2 * kmax) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace stefan
