#include "stefan/identity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stefan/errors.hpp"

namespace stefan {
namespace {

using IF = InterfaceField;

// Weights for the centred derivative at the middle of three (possibly
// non-uniform) time levels.
std::array<double, 3> centred_weights(double t0, double t1, double t2) {
  const double h1 = t1 - t0, h2 = t2 - t1;
  return {-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))};
}

IF combine(const std::array<double, 3>& c, const IF& a, const IF& b, const IF& d) {
  IF out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = c[0] * a[i] + c[1] * b[i] + c[2] * d[i];
  return out;
}

BulkField combine(const std::array<double, 3>& c, const BulkField& a, const BulkField& b,
                  const BulkField& d) {
  BulkField out(a.n_x(), a.n_z());
  auto o = out.values();
  auto x = a.values(), y = b.values(), z = d.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = c[0] * x[i] + c[1] * y[i] + c[2] * z[i];
  return out;
}

IF dx(const IF& f, int order = 1) { return d_tangential(f, order); }

struct PsiData {
  IF psi_x, w, w3, p;
};

PsiData psi_data(const IF& psi) {
  PsiData d{dx(psi), IF(psi.size()), IF(psi.size()), IF(psi.size())};
  for (int i = 0; i < psi.size(); ++i) {
    const double q = 1.0 + d.psi_x[i] * d.psi_x[i];
    const double b = std::sqrt(q);
    d.w[i] = 1.0 / b;
    d.w3[i] = 1.0 / (b * b * b);
    d.p[i] = q;
  }
  return d;
}

struct PsiRates {
  PsiData now;
  IF psi_xt, w_t, w3_t, w_x;
};

// The interface term A(chi, omega) in one tangential dimension, pointwise.
// dchi = chi - omega is passed separately so cross terms vanish exactly when
// the two coincide.
IF a_term(const IF& omega, const IF& omega_t, const IF& dchi, const PsiRates& pr, double& cross) {
  const int n = omega.size();
  const IF wxx = dx(omega, 2), wxxx = dx(omega, 3);
  const IF wxt = dx(omega_t, 1), wxxt = dx(omega_t, 2);
  const IF dcxx = dx(dchi, 2);
  const auto& px = pr.now.psi_x;
  const auto& w = pr.now.w;
  const auto& w3 = pr.now.w3;
  IF m1(n), m2(n);
  for (int i = 0; i < n; ++i) {
    m1[i] = px[i] * px[i] * wxt[i] * w3[i];
    m2[i] = px[i] * px[i] * wxx[i] * w3[i];
  }
  const IF m1x = dx(m1), m2x = dx(m2);
  IF out(n);
  for (int i = 0; i < n; ++i) {
    const double c1 = 2.0 * wxxt[i] * dcxx[i] * w[i];
    const double c2 = -2.0 * wxxt[i] * px[i] * px[i] * dcxx[i] * w3[i];
    cross = std::max({cross, std::abs(c1), std::abs(c2)});
    out[i] = c1 + c2 - wxx[i] * wxx[i] * pr.w_t[i] +
             2.0 * wxt[i] * wxx[i] * pr.w_x[i] - 2.0 * wxt[i] * pr.w_x[i] * wxx[i] +
             2.0 * wxx[i] * wxx[i] * px[i] * pr.psi_xt[i] * w3[i] +
             wxx[i] * px[i] * wxx[i] * px[i] * pr.w3_t[i] -
             2.0 * wxx[i] * (m1x[i] - px[i] * px[i] * wxxt[i] * w3[i]) +
             2.0 * wxt[i] * (m2x[i] - px[i] * px[i] * wxxx[i] * w3[i]);
  }
  return out;
}

double bulk_sq(const BulkField& a, const BulkField& b, const BulkField* wgt, int pw) {
  BulkField fa(a.n_x(), a.n_z()), fb(a.n_x(), a.n_z());
  auto pa = fa.values(), pb = fb.values();
  auto va = a.values(), vb = b.values();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    double w = 1.0;
    if (wgt) {
      w = wgt->values()[i];
      if (pw == 2) w *= w;
    }
    pa[i] = w * va[i] * va[i];
    pb[i] = w * vb[i] * vb[i];
  }
  return integrate_split(fa, fb);
}

}  // namespace

IdentityTerms identity_terms(const IdentityInputs& in, const Cutoff& cutoff, bool include_B) {
  const auto& L0 = in.level[0];
  const auto& L1 = in.level[1];
  const auto& L2 = in.level[2];
  const double eps = in.epsilon;
  const int nx = L1.U.n_x(), nz = L1.U.n_z();
  const NormalGrid zg(nz);
  const auto cw = centred_weights(L0.t, L1.t, L2.t);
  IdentityTerms out;

  // ---- left-hand side
  const StaticEnergy e0 = energy_k0(L0.U, L0.omega, L0.psi, eps, cutoff);
  const StaticEnergy e2 = energy_k0(L2.U, L2.omega, L2.psi, eps, cutoff);
  const StaticEnergy e1 = energy_k0(L1.U, L1.omega, L1.psi, eps, cutoff);
  out.dEdt = cw[0] * e0.E_eps + cw[1] * e1.E_eps + cw[2] * e2.E_eps;

  const BulkField& U = L1.U;
  const BulkField Ut = combine(cw, L0.U, L1.U, L2.U);
  const IF omega_t = combine(cw, L0.omega, L1.omega, L2.omega);
  const IF chi_t = combine(cw, L0.chi, L1.chi, L2.chi);
  const IF psi_t = combine(cw, L0.psi, L1.psi, L2.psi);

  const InterfaceField zero_rate(nx);
  const TransformCoefficients k1 = coefficients(L1.psi, psi_t, cutoff, zg);
  const BulkField a0 = coefficients(L0.psi, zero_rate, cutoff, zg).a;
  const BulkField a2 = coefficients(L2.psi, zero_rate, cutoff, zg).a;
  const BulkField& a = k1.a;
  const BulkField& a_z = k1.a_z;
  const BulkField a_t = combine(cw, a0, a, a2);
  const BulkField a_x = d_tangential(a, 1);

  const BulkField Ux = d_tangential(U, 1);
  const BulkField Uxx = d_tangential(U, 2);
  const BulkField Uza = d_normal(U, Side::above), Uzb = d_normal(U, Side::below);
  const BulkField Uxza = d_tangential(Uza, 1), Uxzb = d_tangential(Uzb, 1);
  const BulkField Uzza = d_normal2(U, Side::above), Uzzb = d_normal2(U, Side::below);

  const double ux2 = bulk_sq(Ux, Ux, nullptr, 1);
  const double auz2 = bulk_sq(Uza, Uzb, &a, 1);
  const PsiData pd = psi_data(L1.psi);
  const IF wt_x = dx(omega_t), wt_xxx = dx(omega_t, 3);
  double dint = 0.0;
  {
    IF g(nx);
    for (int i = 0; i < nx; ++i) g[i] = 2.0 * wt_x[i] * wt_x[i] * pd.w[i] + 2.0 * eps * wt_xxx[i] * wt_xxx[i] * pd.w[i];
    dint = integrate(g);
  }
  out.D = bulk_sq(Ut, Ut, nullptr, 1) + ux2 + auz2 + bulk_sq(Uxx, Uxx, nullptr, 1) +
          2.0 * bulk_sq(Uxza, Uxzb, &a, 1) + bulk_sq(Uzza, Uzzb, &a, 2) + dint;
  out.extra = ux2 + auz2;
  out.lhs = out.dEdt + out.D + out.extra;

  // ---- bulk right-hand side
  {
    BulkField pa(nx, nz), pb(nx, nz), ra(nx, nz), rb(nx, nz);
    for (int j = 0; j < nz; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double u = U(j, i), ut = Ut(j, i), uxx = Uxx(j, i);
        auto side = [&](double f, double uz, double uxz, double& P, double& R) {
          P = f * u - a_z(j, i) * uz * u;
          R = f * f + a_t(j, i) * uz * uz - 2.0 * a_z(j, i) * ut * uz + 2.0 * a_z(j, i) * uxx * uz -
              2.0 * a_x(j, i) * uz * uxz;
        };
        side(in.f_above(j, i), Uza(j, i), Uxza(j, i), pa(j, i), ra(j, i));
        side(in.f_below(j, i), Uzb(j, i), Uxzb(j, i), pb(j, i), rb(j, i));
      }
    }
    out.P = integrate_split(pa, pb);
    out.R = integrate_split(ra, rb);
  }

  // ---- interface right-hand side
  PsiRates pr;
  pr.now = pd;
  pr.psi_xt = dx(psi_t);
  {
    const PsiData p0 = psi_data(L0.psi), p2 = psi_data(L2.psi);
    pr.w_t = combine(cw, p0.w, pd.w, p2.w);
    pr.w3_t = combine(cw, p0.w3, pd.w3, p2.w3);
  }
  pr.w_x = dx(pd.w);

  const IF& omega = L1.omega;
  const IF& chi = L1.chi;
  const IF dchi = chi - omega;
  const IF dchi_t = chi_t - omega_t;

  auto g_of = [&](const IdentityLevel& L) {
    const PsiData d = psi_data(L.psi);
    const IF cxx = dx(L.chi, 2);
    IF g(nx);
    for (int i = 0; i < nx; ++i) g[i] = -d.psi_x[i] * d.psi_x[i] * cxx[i] * d.w3[i] + L.G[i];
    return g;
  };
  const IF g1 = g_of(L1);
  const IF g_t = combine(cw, g_of(L0), g1, g_of(L2));

  const IF w_x = dx(omega), w_xxx = dx(omega, 3);
  const IF w_xxxxt = dx(omega_t, 4);
  const IF c_x = dx(chi), c_xx = dx(chi, 2), c_xxxx = dx(chi, 4);
  const IF ct_x = dx(chi_t), ct_xx = dx(chi_t, 2);
  const IF dc_x = dx(dchi), dc_xxx = dx(dchi, 3);
  const IF dct_x = dx(dchi_t), dct_xxx = dx(dchi_t, 3);
  const IF U0 = U.trace(), Ut0 = Ut.trace(), Uxx0 = Uxx.trace();
  const IF G_xx = dx(L1.G, 2);

  double cross = 0.0;
  IF Qf(nx), Sf(nx), Tf(nx), Af(nx), Bf(nx);
  const IF A = a_term(omega, omega_t, dchi, pr, cross);
  IF Bterm(nx);
  if (include_B) {
    const IF Ab = a_term(dx(omega, 2), dx(omega_t, 2), dx(dchi, 2), pr, cross);
    IF K(nx), Ks(nx);
    for (int i = 0; i < nx; ++i) {
      const double px2 = pd.psi_x[i] * pd.psi_x[i];
      K[i] = c_xx[i] * pd.w[i] - px2 * c_xx[i] * pd.w3[i];
      Ks[i] = c_xxxx[i] * pd.w[i] - px2 * c_xxxx[i] * pd.w3[i];
    }
    const IF K_xx = dx(K, 2);
    for (int i = 0; i < nx; ++i) Bterm[i] = eps * Ab[i] + 2.0 * eps * (K_xx[i] - Ks[i]) * w_xxxxt[i];
  }
  for (int i = 0; i < nx; ++i) {
    const double w = pd.w[i], p = pd.p[i];
    const double M = omega_t[i] + eps * w_xxxxt[i];
    const double h = in.h[i];
    const double q1 = wt_x[i] * dc_x[i] * w;
    const double q2 = eps * wt_xxx[i] * dc_xxx[i] * w;
    const double s1 = 2.0 * wt_x[i] * dct_x[i] * w;
    const double s2 = 2.0 * eps * wt_xxx[i] * dct_xxx[i] * w;
    cross = std::max({cross, std::abs(q1), std::abs(q2), std::abs(s1), std::abs(s2)});
    Qf[i] = q1 + q2 - 0.5 * (w_x[i] * w_x[i] + eps * w_xxx[i] * w_xxx[i]) * pr.w_t[i] +
            omega_t[i] * c_x[i] * pr.w_x[i] + eps * wt_xxx[i] * pr.w_x[i] * c_xx[i] - M * g1[i] -
            p * h * U0[i];
    Sf[i] = s1 + s2 + 2.0 * ct_x[i] * pr.w_x[i] * omega_t[i] +
            2.0 * eps * wt_xxx[i] * pr.w_x[i] * ct_xx[i] -
            2.0 * M * (c_xx[i] * pr.w_t[i] + g_t[i]) - 2.0 * p * h * Ut0[i];
    Af[i] = A[i];
    Bf[i] = Bterm[i];
    Tf[i] = A[i] + Bterm[i] + 2.0 * G_xx[i] * M + 2.0 * Uxx0[i] * h * p;
  }
  out.Q = integrate(Qf);
  out.S = integrate(Sf);
  out.T = integrate(Tf);
  out.A = integrate(Af);
  out.B = integrate(Bf);
  out.rhs = 2.0 * out.P + out.R - (2.0 * out.Q + out.S + out.T);
  out.cross_max = cross;
  const double floor = 1e-14 * nx * nz;
  const double defect = std::abs(out.lhs - out.rhs);
  out.lhs_rhs_residual = defect / (std::abs(out.lhs) + std::abs(out.rhs) + floor);
  const double scale = std::abs(out.dEdt) + out.D + out.extra + 2.0 * std::abs(out.P) + std::abs(out.R) +
                       2.0 * std::abs(out.Q) + std::abs(out.S) + std::abs(out.T);
  out.residual = defect / (scale + floor);
  return out;
}

std::optional<IdentityTerms> identity_residual_k0(std::span<const Snapshot> window, double epsilon,
                                                  const Cutoff& cutoff, bool include_B) {
  if (window.size() < 3) return std::nullopt;
  const auto& s0 = window[window.size() - 3];
  const auto& s1 = window[window.size() - 2];
  const auto& s2 = window[window.size() - 1];
  const int nx = s1.u.n_x(), nz = s1.u.n_z();
  IdentityInputs in;
  in.epsilon = epsilon;
  const IF zero(nx);
  in.level[0] = {s0.t, s0.u, s0.rho, s0.rho, s0.rho, zero};
  in.level[1] = {s1.t, s1.u, s1.rho, s1.rho, s1.rho, zero};
  in.level[2] = {s2.t, s2.u, s2.rho, s2.rho, s2.rho, zero};
  in.h = zero;

  const auto cw = centred_weights(s0.t, s1.t, s2.t);
  const IF rho_t = combine(cw, s0.rho, s1.rho, s2.rho);
  const TransformCoefficients k = coefficients(s1.rho, rho_t, cutoff, NormalGrid(nz));
  const BulkField uza = d_normal(s1.u, Side::above), uzb = d_normal(s1.u, Side::below);
  const BulkField uxza = d_tangential(uza, 1), uxzb = d_tangential(uzb, 1);
  in.f_above = BulkField(nx, nz);
  in.f_below = BulkField(nx, nz);
  for (int j = 0; j < nz; ++j) {
    for (int i = 0; i < nx; ++i) {
      in.f_above(j, i) = -k.b(j, i) * uxza(j, i) - k.c(j, i) * uza(j, i);
      in.f_below(j, i) = -k.b(j, i) * uxzb(j, i) - k.c(j, i) * uzb(j, i);
    }
  }
  IdentityTerms terms = identity_terms(in, cutoff, include_B);
  if (terms.cross_max != 0.0) {
    throw std::logic_error("identity: cross terms do not vanish although chi == omega");
  }
  return terms;
}

}  // namespace stefan
