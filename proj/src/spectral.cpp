#include "stefan/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace stefan {
namespace {

std::mutex g_plan_mutex;

}  // namespace

Fourier::Fourier(int n) : n_(n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("Fourier: length must be even, got " + std::to_string(n));
  }
  std::vector<double> real(n);
  std::vector<cplx> spec(n / 2 + 1);
  auto* c = reinterpret_cast<fftw_complex*>(spec.data());
  std::lock_guard lock(g_plan_mutex);
  r2c_ = fftw_plan_dft_r2c_1d(n, real.data(), c, FFTW_ESTIMATE | FFTW_UNALIGNED);
  c2r_ = fftw_plan_dft_c2r_1d(n, c, real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
}

void Fourier::forward(std::span<const double> in, std::span<cplx> out) const {
  if (static_cast<int>(in.size()) != n_ || static_cast<int>(out.size()) != modes()) {
    throw std::invalid_argument("Fourier::forward: size mismatch");
  }
  // r2c preserves its input by default, so the const_cast is safe.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void Fourier::inverse(std::span<const cplx> in, std::span<double> out) const {
  if (static_cast<int>(in.size()) != modes() || static_cast<int>(out.size()) != n_) {
    throw std::invalid_argument("Fourier::inverse: size mismatch");
  }
  // c2r destroys its input.
  std::vector<cplx> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_),
                       reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double scale = 1.0 / n_;
  for (double& v : out) v *= scale;
}

std::vector<cplx> Fourier::forward(std::span<const double> in) const {
  std::vector<cplx> out(modes());
  forward(in, out);
  return out;
}

std::vector<double> Fourier::inverse(std::span<const cplx> in) const {
  std::vector<double> out(n_);
  inverse(in, out);
  return out;
}

const Fourier& fourier(int n) {
  static std::mutex cache_mutex;
  static std::map<int, std::unique_ptr<Fourier>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Fourier>(n);
  return *slot;
}

}  // namespace stefan
