/// @file spectral.hpp
/// Real-to-complex Fourier transforms on the 2*pi-periodic grid.
#pragma once

#include <complex>
#include <span>
#include <vector>

namespace stefan {

using cplx = std::complex<double>;

/// Transform pair for a fixed even length n. Mode index k carries wavenumber k.
/// Forward is unnormalized; inverse divides by n, so inverse(forward(f)) == f.
class Fourier {
 public:
  explicit Fourier(int n);

  int size() const { return n_; }
  int modes() const { return n_ / 2 + 1; }

  void forward(std::span<const double> in, std::span<cplx> out) const;
  void inverse(std::span<const cplx> in, std::span<double> out) const;

  std::vector<cplx> forward(std::span<const double> in) const;
  std::vector<double> inverse(std::span<const cplx> in) const;

 private:
  int n_;
  void* r2c_;
  void* c2r_;
};

/// Shared, thread-safe transform for length n (plans are created once).
const Fourier& fourier(int n);

}  // namespace stefan
