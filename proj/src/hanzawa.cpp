#include "stefan/hanzawa.hpp"

#include <cmath>
#include <sstream>

#include "stefan/errors.hpp"
#include "stefan/log.hpp"

namespace stefan {

DegenerateTransform::DegenerateTransform(int ix, int iz, double jacobian)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "degenerate transform: 1 + phi' rho = " << jacobian << " at node (ix=" << ix
           << ", iz=" << iz << ")";
        return os.str();
      }()),
      ix_(ix),
      iz_(iz),
      jacobian_(jacobian) {}

Cutoff::Cutoff(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0 / 3.0)) {
    std::ostringstream os;
    os << "cutoff alpha must lie in (0, 1/3), got " << alpha;
    throw ConfigError(os.str());
  }
}

CutoffValues Cutoff::operator()(double z) const {
  const double r = std::abs(z);
  if (r <= alpha_) return {1.0, 0.0, 0.0};
  if (r >= 1.0 - alpha_) return {0.0, 0.0, 0.0};
  const double w = 1.0 - 2.0 * alpha_;
  const double s = (r - alpha_) / w;
  const double S = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
  const double dS = 30.0 * s * s * (1.0 - s) * (1.0 - s);
  const double d2S = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
  const double sign = z < 0.0 ? -1.0 : 1.0;
  return {1.0 - S, -sign * dS / w, -d2S / (w * w)};
}

double Cutoff::max_slope() const { return 1.875 / (1.0 - 2.0 * alpha_); }

TransformCoefficients coefficients(const InterfaceField& rho, const InterfaceField& rho_t,
                                   const Cutoff& cutoff, const NormalGrid& zgrid) {
  require_finite(rho, "coefficients(rho)");
  require_finite(rho_t, "coefficients(rho_t)");
  const int nx = rho.size();
  const int nz = zgrid.size();
  if (rho_t.size() != nx) throw InvalidField("coefficients: rho_t size mismatch");
  const InterfaceField rx = d_tangential(rho, 1);
  const InterfaceField rxx = d_tangential(rho, 2);

  TransformCoefficients k{BulkField(nx, nz), BulkField(nx, nz), BulkField(nx, nz),
                          BulkField(nx, nz), BulkField(nx, nz), BulkField(nx, nz),
                          BulkField(nx, nz)};
  for (int j = 0; j < nz; ++j) {
    const CutoffValues cv = cutoff(zgrid.node(j));
    for (int i = 0; i < nx; ++i) {
      const double J = 1.0 + cv.dphi * rho[i];
      if (!(J > 0.0)) throw DegenerateTransform(i, j, J);
    }
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nz; ++j) {
    const CutoffValues cv = cutoff(zgrid.node(j));
    const double p = cv.phi, dp = cv.dphi, d2p = cv.d2phi;
    for (int i = 0; i < nx; ++i) {
      const double J = 1.0 + dp * rho[i];
      const double iJ = 1.0 / J;
      const double N = 1.0 + p * p * rx[i] * rx[i];
      k.jacobian(j, i) = J;
      k.a(j, i) = N * iJ * iJ;
      k.a_z(j, i) = 2.0 * p * dp * rx[i] * rx[i] * iJ * iJ - 2.0 * N * d2p * rho[i] * iJ * iJ * iJ;
      k.b(j, i) = 2.0 * p * rx[i] * iJ;
      const double d = p * rxx[i] * iJ - 2.0 * p * dp * rx[i] * rx[i] * iJ * iJ +
                       d2p * rho[i] * N * iJ * iJ * iJ;
      const double e = -p * rho_t[i] * iJ;
      k.d(j, i) = d;
      k.e(j, i) = e;
      k.c(j, i) = d + e;
    }
  }
  return k;
}

InterfaceField bracket(const InterfaceField& rho) {
  InterfaceField rx = d_tangential(rho, 1);
  for (int i = 0; i < rx.size(); ++i) rx[i] = std::sqrt(1.0 + rx[i] * rx[i]);
  return rx;
}

namespace {

void resolution_guard(const InterfaceField& rho) {
  if (spectral_tail_fraction(rho) > 1e-8) {
    log::warn_once("curvature-resolution",
                   "curvature: interface shape is under-resolved (top third of the spectrum "
                   "carries more than 1e-8 of its energy)");
  }
}

}  // namespace

InterfaceField curvature(const InterfaceField& rho) {
  resolution_guard(rho);
  InterfaceField rx = d_tangential(rho, 1);
  for (int i = 0; i < rx.size(); ++i) rx[i] = rx[i] / std::sqrt(1.0 + rx[i] * rx[i]);
  return d_tangential(rx, 1);
}

InterfaceField curvature_expanded(const InterfaceField& rho) {
  resolution_guard(rho);
  const InterfaceField rx = d_tangential(rho, 1);
  const InterfaceField rxx = d_tangential(rho, 2);
  InterfaceField out(rho.size());
  for (int i = 0; i < rho.size(); ++i) {
    const double b = std::sqrt(1.0 + rx[i] * rx[i]);
    out[i] = rxx[i] / b - rx[i] * rx[i] * rxx[i] / (b * b * b);
  }
  return out;
}

InterfaceField jump_un(const BulkField& u) {
  const int nz = u.n_z();
  if (nz < 5) throw InvalidField("jump_un requires n_z >= 5");
  const int c = (nz - 1) / 2;
  const double h = 2.0 / (nz - 1);
  InterfaceField out(u.n_x());
  for (int i = 0; i < u.n_x(); ++i) {
    out[i] = (6.0 * u(c, i) - 4.0 * u(c - 1, i) + u(c - 2, i) - 4.0 * u(c + 1, i) + u(c + 2, i)) /
             (2.0 * h);
  }
  return out;
}

}  // namespace stefan
