/// @file fields.hpp
/// Grids and discrete fields on the fixed domain T x [-1, 1].
///
/// The tangential direction is the 2*pi-periodic torus, sampled at n_x
/// equispaced nodes and differentiated spectrally. The normal direction uses
/// n_z (odd) equispaced nodes with z = 0 at the centre index; normal
/// derivatives are finite differences that treat z = 0 as a break point, so a
/// field may have a kink there.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace stefan {

class TangentialGrid {
 public:
  explicit TangentialGrid(int n_x);
  int size() const { return n_; }
  double spacing() const;
  double node(int i) const { return i * spacing(); }
  double length() const;

 private:
  int n_;
};

class NormalGrid {
 public:
  explicit NormalGrid(int n_z);
  int size() const { return n_; }
  double spacing() const { return 2.0 / (n_ - 1); }
  double node(int j) const { return -1.0 + j * spacing(); }
  /// Index of the node at z = 0.
  int center() const { return (n_ - 1) / 2; }

 private:
  int n_;
};

struct Grid {
  TangentialGrid x;
  NormalGrid z;
  Grid(int n_x, int n_z) : x(n_x), z(n_z) {}
  int n_x() const { return x.size(); }
  int n_z() const { return z.size(); }
};

/// Field on the interface torus T.
class InterfaceField {
 public:
  InterfaceField() = default;
  explicit InterfaceField(int n_x, double fill = 0.0);
  InterfaceField(std::vector<double> values);

  static InterfaceField sample(const TangentialGrid& grid, const std::function<double(double)>& f);

  int size() const { return static_cast<int>(v_.size()); }
  double& operator[](int i) { return v_[i]; }
  double operator[](int i) const { return v_[i]; }
  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }
  const std::vector<double>& data() const { return v_; }

  double mean() const;
  double max_abs() const;
  bool finite() const;

  InterfaceField& operator+=(const InterfaceField& o);
  InterfaceField& operator-=(const InterfaceField& o);
  InterfaceField& operator*=(double s);

 private:
  std::vector<double> v_;
};

InterfaceField operator+(InterfaceField a, const InterfaceField& b);
InterfaceField operator-(InterfaceField a, const InterfaceField& b);
InterfaceField operator*(double s, InterfaceField a);
/// Pointwise product.
InterfaceField operator*(const InterfaceField& a, const InterfaceField& b);

/// Field on T x [-1, 1]. Row iz holds the n_x tangential values at z_iz.
class BulkField {
 public:
  BulkField() = default;
  BulkField(int n_x, int n_z, double fill = 0.0);

  static BulkField sample(const Grid& grid, const std::function<double(double, double)>& f);

  int n_x() const { return nx_; }
  int n_z() const { return nz_; }
  double& operator()(int iz, int ix) { return v_[static_cast<std::size_t>(iz) * nx_ + ix]; }
  double operator()(int iz, int ix) const { return v_[static_cast<std::size_t>(iz) * nx_ + ix]; }

  std::span<double> row(int iz) { return {v_.data() + static_cast<std::size_t>(iz) * nx_, static_cast<std::size_t>(nx_)}; }
  std::span<const double> row(int iz) const {
    return {v_.data() + static_cast<std::size_t>(iz) * nx_, static_cast<std::size_t>(nx_)};
  }
  InterfaceField row_field(int iz) const;
  void set_row(int iz, const InterfaceField& f);
  /// Values on z = 0.
  InterfaceField trace() const { return row_field((nz_ - 1) / 2); }

  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }

  double max_abs() const;
  bool finite() const;
  bool same_shape(const BulkField& o) const { return nx_ == o.nx_ && nz_ == o.nz_; }

  BulkField& operator+=(const BulkField& o);
  BulkField& operator-=(const BulkField& o);
  BulkField& operator*=(double s);

 private:
  int nx_ = 0;
  int nz_ = 0;
  std::vector<double> v_;
};

BulkField operator+(BulkField a, const BulkField& b);
BulkField operator-(BulkField a, const BulkField& b);
BulkField operator*(double s, BulkField a);
BulkField operator*(const BulkField& a, const BulkField& b);

/// Which one-sided limit to take at z = 0.
enum class Side { above, below, centered };

/// Spectral tangential derivative of the given order (order >= 0).
/// Odd orders zero the Nyquist coefficient. Throws InvalidField on NaN/Inf.
InterfaceField d_tangential(const InterfaceField& f, int order = 1);
/// Row-wise tangential derivative.
BulkField d_tangential(const BulkField& f, int order = 1);

/// Second-order normal derivative. Interior rows use centred differences;
/// the walls and the z = 0 row use 3-point one-sided stencils on the chosen
/// side. Requires n_z >= 5.
BulkField d_normal(const BulkField& f, Side side);
/// Second normal derivative; 4-point one-sided at walls and at z = 0 (unless
/// centered). Requires n_z >= 7.
BulkField d_normal2(const BulkField& f, Side side);

/// Rectangle rule on the torus (spectrally accurate for smooth periodic data).
double integrate(const InterfaceField& f);
/// Torus rectangle rule times trapezoid in z.
double integrate(const BulkField& f);
/// Bulk integral of a field with a possible jump at z = 0: rows z < 0 are
/// taken from `below`, rows z > 0 from `above`, and the z = 0 row contributes
/// half a cell from each.
double integrate_split(const BulkField& above, const BulkField& below);

/// Fraction of the non-mean spectral energy in the top third of the spectrum.
double spectral_tail_fraction(const InterfaceField& f);

void require_finite(const InterfaceField& f, const char* where);
void require_finite(const BulkField& f, const char* where);

}  // namespace stefan
