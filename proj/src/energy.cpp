#include "stefan/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stefan/errors.hpp"

namespace stefan {

// ---------------------------------------------------------------- DerivativeStack

DerivativeStack::DerivativeStack(std::span<const Snapshot> history, std::size_t at, int max_order) {
  if (history.empty() || at >= history.size()) throw std::invalid_argument("DerivativeStack: bad index");
  if (max_order < 0) throw std::invalid_argument("DerivativeStack: negative order");
  t_ = history[at].t;
  const int n = static_cast<int>(history.size());
  const int ia = static_cast<int>(at);
  for (int s = 0; s <= max_order; ++s) {
    int start = -1;
    if (ia >= s) {
      start = ia - s;
    } else if (n >= s + 1) {
      start = 0;
    }
    if (start < 0) {
      u_.emplace_back();
      rho_.emplace_back();
      avail_.push_back(false);
      fwd_.push_back(false);
      continue;
    }
    // s! times the divided difference over history[start .. start+s].
    double fact = 1.0;
    for (int q = 2; q <= s; ++q) fact *= q;
    BulkField du(history[at].u.n_x(), history[at].u.n_z());
    InterfaceField dr(history[at].rho.size());
    for (int i = start; i <= start + s; ++i) {
      double denom = 1.0;
      for (int j = start; j <= start + s; ++j) {
        if (j != i) denom *= history[i].t - history[j].t;
      }
      const double w = fact / denom;
      auto dst = du.values();
      auto src = history[i].u.values();
      for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += w * src[p];
      for (int p = 0; p < dr.size(); ++p) dr[p] += w * history[i].rho[p];
    }
    u_.push_back(std::move(du));
    rho_.push_back(std::move(dr));
    avail_.push_back(true);
    fwd_.push_back(start + s != ia);
  }
}

DerivativeStack::DerivativeStack(std::span<const Snapshot> history, int max_order)
    : DerivativeStack(history, history.empty() ? 0 : history.size() - 1, max_order) {}

std::vector<std::pair<int, int>> derivative_pairs(int k_diag) {
  std::vector<std::pair<int, int>> out;
  for (int s = 0; 2 * s <= 2 * k_diag; ++s) {
    for (int mu = 0; mu + 2 * s <= 2 * k_diag; ++mu) out.emplace_back(mu, s);
  }
  return out;
}

// ---------------------------------------------------------------- pieces

namespace {

struct Weights {
  InterfaceField w;   // <psi>^-1
  InterfaceField w3;  // <psi>^-3
  InterfaceField psi_x;
};

Weights weights(const InterfaceField& psi) {
  Weights out{InterfaceField(psi.size()), InterfaceField(psi.size()), d_tangential(psi, 1)};
  for (int i = 0; i < psi.size(); ++i) {
    const double b = std::sqrt(1.0 + out.psi_x[i] * out.psi_x[i]);
    out.w[i] = 1.0 / b;
    out.w3[i] = 1.0 / (b * b * b);
  }
  return out;
}

double weighted_square(const InterfaceField& f, const InterfaceField& w) {
  InterfaceField g(f.size());
  for (int i = 0; i < f.size(); ++i) g[i] = f[i] * f[i] * w[i];
  return integrate(g);
}

double square(const InterfaceField& f) {
  InterfaceField g(f.size());
  for (int i = 0; i < f.size(); ++i) g[i] = f[i] * f[i];
  return integrate(g);
}

double i_psi_w(const InterfaceField& omega, const Weights& wt) {
  const InterfaceField wxx = d_tangential(omega, 2);
  InterfaceField g(omega.size());
  for (int i = 0; i < omega.size(); ++i) {
    const double q = wxx[i] * wt.psi_x[i];
    g[i] = wxx[i] * wxx[i] * wt.w[i] - q * q * wt.w3[i];
  }
  return integrate(g);
}

double i_psi_lower_w(const InterfaceField& omega, const Weights& wt) {
  return weighted_square(d_tangential(omega, 2), wt.w3);
}

// Integral of weight * (field)^2 where field has distinct one-sided rows at z = 0.
double split_square(const BulkField& above, const BulkField& below, const BulkField* weight,
                    int weight_power = 1) {
  BulkField fa(above.n_x(), above.n_z());
  BulkField fb(above.n_x(), above.n_z());
  auto pa = fa.values();
  auto pb = fb.values();
  auto va = above.values();
  auto vb = below.values();
  for (std::size_t p = 0; p < pa.size(); ++p) {
    double w = 1.0;
    if (weight) {
      w = weight->values()[p];
      if (weight_power == 2) w *= w;
    }
    pa[p] = w * va[p] * va[p];
    pb[p] = w * vb[p] * vb[p];
  }
  return integrate_split(fa, fb);
}

double bulk_square(const BulkField& f) { return split_square(f, f, nullptr); }

struct BulkParts {
  double V2 = 0, Vx2 = 0, aVz2 = 0, Vz2 = 0;
};

BulkParts bulk_e(const BulkField& V, const BulkField& a) {
  BulkParts p;
  p.V2 = bulk_square(V);
  p.Vx2 = bulk_square(d_tangential(V, 1));
  const BulkField za = d_normal(V, Side::above);
  const BulkField zb = d_normal(V, Side::below);
  p.aVz2 = split_square(za, zb, &a);
  p.Vz2 = split_square(za, zb, nullptr);
  return p;
}

struct BulkDParts {
  double weighted = 0;  // Vx^2 + a Vz^2 + Vxx^2 + 2 a Vxz^2 + a^2 Vzz^2
  double plain = 0;     // Vx^2 + Vz^2 + Vxx^2 + 2 Vxz^2 + Vzz^2
};

BulkDParts bulk_d(const BulkField& V, const BulkField& a) {
  BulkDParts p;
  const double vx2 = bulk_square(d_tangential(V, 1));
  const double vxx2 = bulk_square(d_tangential(V, 2));
  const BulkField za = d_normal(V, Side::above);
  const BulkField zb = d_normal(V, Side::below);
  const BulkField xza = d_tangential(za, 1);
  const BulkField xzb = d_tangential(zb, 1);
  const BulkField zza = d_normal2(V, Side::above);
  const BulkField zzb = d_normal2(V, Side::below);
  p.weighted = vx2 + split_square(za, zb, &a) + vxx2 + 2.0 * split_square(xza, xzb, &a) +
               split_square(zza, zzb, &a, 2);
  p.plain = vx2 + split_square(za, zb, nullptr) + vxx2 + 2.0 * split_square(xza, xzb, nullptr) +
            split_square(zza, zzb, nullptr);
  return p;
}

BulkField weight_a(const InterfaceField& psi, const Cutoff& cutoff, int n_z) {
  return coefficients(psi, InterfaceField(psi.size()), cutoff, NormalGrid(n_z)).a;
}

}  // namespace

double i_psi(const InterfaceField& omega, const InterfaceField& psi) {
  if (omega.size() != psi.size()) throw InvalidField("i_psi: size mismatch");
  return i_psi_w(omega, weights(psi));
}

double i_psi_lower_bound(const InterfaceField& omega, const InterfaceField& psi) {
  if (omega.size() != psi.size()) throw InvalidField("i_psi_lower_bound: size mismatch");
  return i_psi_lower_w(omega, weights(psi));
}

EnergyBreakdown evaluate_energies(const DerivativeStack& stack, const InterfaceField& psi,
                                  double epsilon, int k_diag, const Cutoff& cutoff) {
  if (k_diag < 0 || k_diag > 3) throw ConfigError("k_diag must lie in [0, 3]");
  EnergyBreakdown out;
  out.i_psi_min_gap = std::numeric_limits<double>::infinity();
  const Weights wt = weights(psi);
  const BulkField a = weight_a(psi, cutoff, stack.u(0).n_z());

  double e = 0, e_eps = 0, d = 0, d_eps = 0, se = 0, se_eps = 0, sd = 0, sd_eps = 0;
  for (auto [mu, s] : derivative_pairs(k_diag)) {
    if (stack.available(s)) {
      if (stack.forward(s)) out.used_forward = true;
      const BulkField V = d_tangential(stack.u(s), mu);
      const InterfaceField W = d_tangential(stack.rho(s), mu);
      const BulkParts b = bulk_e(V, a);
      const InterfaceField Wx = d_tangential(W, 1);
      const InterfaceField Wxx = d_tangential(W, 2);
      const InterfaceField Wxxx = d_tangential(W, 3);
      const InterfaceField Wxxxx = d_tangential(W, 4);
      const double ip = i_psi_w(W, wt);
      const double ip_lb = i_psi_lower_w(W, wt);
      const double ip2 = i_psi_w(Wxx, wt);
      const double ip2_lb = i_psi_lower_w(Wxx, wt);
      out.i_psi_min_gap = std::min({out.i_psi_min_gap, ip - ip_lb, ip2 - ip2_lb});
      e += b.V2 + b.Vx2 + b.aVz2 + weighted_square(Wx, wt.w) + ip;
      e_eps += weighted_square(Wxxx, wt.w) + ip2;
      se += b.V2 + b.Vx2 + b.Vz2 + square(Wx) + square(Wxx);
      se_eps += square(Wxxx) + square(Wxxxx);
    } else {
      out.E.unavailable.emplace_back(mu, s);
    }
    if (stack.available(s) && stack.available(s + 1)) {
      if (stack.forward(s + 1)) out.used_forward = true;
      const BulkField V = d_tangential(stack.u(s), mu);
      const BulkField Vt = d_tangential(stack.u(s + 1), mu);
      const InterfaceField Wt = d_tangential(stack.rho(s + 1), mu);
      const BulkDParts b = bulk_d(V, a);
      const double vt2 = bulk_square(Vt);
      const InterfaceField Wxt = d_tangential(Wt, 1);
      const InterfaceField Wxxxt = d_tangential(Wt, 3);
      d += vt2 + b.weighted + 2.0 * weighted_square(Wxt, wt.w);
      d_eps += 2.0 * weighted_square(Wxxxt, wt.w);
      sd += vt2 + b.plain + square(Wxt);
      sd_eps += square(Wxxxt);
    } else {
      out.D.unavailable.emplace_back(mu, s);
    }
  }
  if (!std::isfinite(out.i_psi_min_gap)) out.i_psi_min_gap = 0.0;
  out.E.value = e;
  out.E_eps.value = e + epsilon * e_eps;
  out.D.value = d;
  out.D_eps.value = d + epsilon * d_eps;
  out.sobolev_E.value = se + epsilon * se_eps;
  out.sobolev_D.value = sd + epsilon * sd_eps;
  out.E_eps.unavailable = out.E.unavailable;
  out.sobolev_E.unavailable = out.E.unavailable;
  out.D_eps.unavailable = out.D.unavailable;
  out.sobolev_D.unavailable = out.D.unavailable;
  return out;
}

FunctionalValue energy_E(const DerivativeStack& stack, const InterfaceField& psi, int k_diag,
                         const Cutoff& cutoff) {
  return evaluate_energies(stack, psi, 0.0, k_diag, cutoff).E;
}

FunctionalValue dissipation_D(const DerivativeStack& stack, const InterfaceField& psi,
                              int k_diag, const Cutoff& cutoff) {
  return evaluate_energies(stack, psi, 0.0, k_diag, cutoff).D;
}

FunctionalValue energy_eps(const DerivativeStack& stack, const InterfaceField& psi,
                           double epsilon, int k_diag, const Cutoff& cutoff) {
  return evaluate_energies(stack, psi, epsilon, k_diag, cutoff).E_eps;
}

FunctionalValue dissipation_eps(const DerivativeStack& stack, const InterfaceField& psi,
                                double epsilon, int k_diag, const Cutoff& cutoff) {
  return evaluate_energies(stack, psi, epsilon, k_diag, cutoff).D_eps;
}

std::pair<FunctionalValue, FunctionalValue> sobolev_norms(const DerivativeStack& stack,
                                                          double epsilon, int k_diag) {
  // Sobolev norms do not depend on psi; use the flat weight.
  const InterfaceField zero(stack.rho(0).size());
  auto b = evaluate_energies(stack, zero, epsilon, k_diag, Cutoff());
  return {b.sobolev_E, b.sobolev_D};
}

StaticEnergy energy_k0(const BulkField& U, const InterfaceField& omega, const InterfaceField& psi,
                       double epsilon, const Cutoff& cutoff) {
  const Weights wt = weights(psi);
  const BulkField a = weight_a(psi, cutoff, U.n_z());
  const BulkParts b = bulk_e(U, a);
  StaticEnergy out;
  out.E = b.V2 + b.Vx2 + b.aVz2 + weighted_square(d_tangential(omega, 1), wt.w) + i_psi_w(omega, wt);
  const InterfaceField wxx = d_tangential(omega, 2);
  out.E_eps = out.E + epsilon * (weighted_square(d_tangential(omega, 3), wt.w) + i_psi_w(wxx, wt));
  return out;
}

double equivalence_constant(double psi_sup, double psi_x_sup, const Cutoff& cutoff) {
  const double m = cutoff.max_slope() * psi_sup;
  if (m >= 1.0) throw DegenerateTransform(-1, -1, 1.0 - m);
  const double a_min = 1.0 / ((1.0 + m) * (1.0 + m));
  const double a_max = (1.0 + psi_x_sup * psi_x_sup) / ((1.0 - m) * (1.0 - m));
  const double b_max = std::sqrt(1.0 + psi_x_sup * psi_x_sup);
  const double upper = std::max({2.0, a_max, a_max * a_max});
  const double lower = std::min({1.0, a_min, a_min * a_min, 1.0 / (b_max * b_max * b_max)});
  return std::max(upper, 1.0 / lower);
}

// ---------------------------------------------------------------- conservation

double weighted_heat(const BulkField& u, const InterfaceField& rho, const Cutoff& cutoff) {
  if (u.n_x() != rho.size()) throw InvalidField("weighted_heat: size mismatch");
  const NormalGrid zg(u.n_z());
  BulkField f(u.n_x(), u.n_z());
  for (int j = 0; j < u.n_z(); ++j) {
    const double dp = cutoff(zg.node(j)).dphi;
    for (int i = 0; i < u.n_x(); ++i) f(j, i) = u(j, i) * (1.0 + dp * rho[i]);
  }
  return integrate(f);
}

double conservation_residual(const Snapshot& before, const Snapshot& after, const Cutoff& cutoff) {
  const double dq = weighted_heat(after.u, after.rho, cutoff) - weighted_heat(before.u, before.rho, cutoff);
  const double dr = integrate(after.rho) - integrate(before.rho);
  return std::abs(dq - dr);
}

double steady_mean(const BulkField& u0, const InterfaceField& rho0, const Cutoff& cutoff) {
  return (integrate(rho0) - weighted_heat(u0, rho0, cutoff)) / (2.0 * std::numbers::pi);
}

double rho_deviation_l2(const InterfaceField& rho, double rho_bar) {
  InterfaceField d(rho.size());
  for (int i = 0; i < rho.size(); ++i) d[i] = (rho[i] - rho_bar) * (rho[i] - rho_bar);
  return std::sqrt(integrate(d));
}

// ---------------------------------------------------------------- decay fit

DecayFit decay_fit(std::span<const double> t, std::span<const double> y, double discard) {
  if (t.size() != y.size()) throw std::invalid_argument("decay_fit: size mismatch");
  DecayFit fit;
  const std::size_t n = t.size();
  const std::size_t first = static_cast<std::size_t>(std::floor(discard * n));
  if (n < first + 3) return fit;
  double ymax = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) return fit;
    ymax = std::max(ymax, y[i]);
  }
  if (ymax <= 1e-24) return fit;

  const std::size_t m = n - first;
  double st = 0, sl = 0;
  for (std::size_t i = first; i < n; ++i) {
    st += t[i];
    sl += std::log(y[i]);
  }
  const double tm = st / m, lm = sl / m;
  double stt = 0, stl = 0, sll = 0;
  for (std::size_t i = first; i < n; ++i) {
    const double dt = t[i] - tm, dl = std::log(y[i]) - lm;
    stt += dt * dt;
    stl += dt * dl;
    sll += dl * dl;
  }
  if (stt <= 0.0) return fit;
  const double slope = stl / stt;
  fit.rate = -slope;
  fit.intercept = lm - slope * tm;
  double ss_res = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    const double r = std::log(y[i]) - (fit.intercept + slope * t[i]);
    ss_res += r * r;
  }
  fit.r_squared = sll > 0.0 ? 1.0 - ss_res / sll : 1.0;
  fit.status = FitStatus::ok;
  fit.samples = m;
  return fit;
}

}  // namespace stefan
