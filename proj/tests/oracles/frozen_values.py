"""Independent oracles for values frozen into the C++ unit tests.

Run with: python3 frozen_values.py
Uses adaptive quadrature (scipy) and root finding over closed-form integrands;
nothing here shares code with the C++ implementation.
"""
import numpy as np
from scipy import integrate, optimize
import sympy as sp

TWO_PI = 2 * np.pi


def quad(f):
    return integrate.quad(f, 0.0, TWO_PI, epsabs=1e-15, epsrel=1e-14, limit=400)[0]


def energy_k0_sine(delta):
    # u = 0, rho = delta sin x: |rho_x|^2 <rho>^-1 + rho_xx^2 <rho>^-3
    w = lambda x: 1.0 / np.sqrt(1.0 + (delta * np.cos(x)) ** 2)
    return quad(lambda x: (delta * np.cos(x)) ** 2 * w(x)) + quad(
        lambda x: (delta * np.sin(x)) ** 2 * w(x) ** 3)


def eps_term_unit_sine():
    # rho = sin x, eps = 1: rho_xxx^2 <rho>^-1 + I_rho(rho_xxxx) = cos^2 w + sin^2 w^3
    w = lambda x: 1.0 / np.sqrt(1.0 + np.cos(x) ** 2)
    return quad(lambda x: np.cos(x) ** 2 * w(x)) + quad(lambda x: np.sin(x) ** 2 * w(x) ** 3)


def eps_term_sine(delta):
    # rho = delta sin x, eps = 1: same integrands scaled by delta^2, weights from delta
    w = lambda x: 1.0 / np.sqrt(1.0 + (delta * np.cos(x)) ** 2)
    return quad(lambda x: (delta * np.cos(x)) ** 2 * w(x)) + quad(
        lambda x: (delta * np.sin(x)) ** 2 * w(x) ** 3)


def dissipation_linear_amplitude(delta_now, delta_rate):
    # u = 0, rho = delta(t) sin x with delta linear in t: D = 2 int rho_xt^2 <rho>^-1
    w = lambda x: 1.0 / np.sqrt(1.0 + (delta_now * np.cos(x)) ** 2)
    return 2.0 * quad(lambda x: (delta_rate * np.cos(x)) ** 2 * w(x))


def curvature_symbolic_check():
    x, d = sp.symbols("x delta", real=True)
    rho = d * sp.sin(x)
    kappa = sp.diff(sp.diff(rho, x) / sp.sqrt(1 + sp.diff(rho, x) ** 2), x)
    closed = -d * sp.sin(x) * (1 + d ** 2 * sp.cos(x) ** 2) ** sp.Rational(-3, 2)
    return sp.simplify(kappa - closed)


def dispersion_root(k, eps):
    # continuum linearization: lambda (1 + eps k^4) = -2 k^2 q tanh q, q = sqrt(k^2 + lambda)
    def f(lam):
        q2 = k * k + lam
        if q2 >= 0:
            q = np.sqrt(q2)
            g = q * np.tanh(q)
        else:
            b = np.sqrt(-q2)
            g = -b * np.tan(b)
        return lam * (1 + eps * k ** 4) + 2 * k * k * g
    # slowest mode lies in (-k^2 - (pi/2)^2, 0)
    return optimize.brentq(f, -k * k - (np.pi / 2) ** 2 + 1e-9, -1e-12, xtol=1e-15)


if __name__ == "__main__":
    print("E_k0(delta=0.1)            = %.15e" % energy_k0_sine(0.1))
    print("E_k0(delta=0.5)            = %.15e" % energy_k0_sine(0.5))
    print("eps term, rho=sin x        = %.15e" % eps_term_unit_sine())
    print("eps term, rho=0.2 sin x    = %.15e" % eps_term_sine(0.2))
    print("D(delta=0.2, rate=0.3)     = %.15e" % dissipation_linear_amplitude(0.2, 0.3))
    print("curvature symbolic residual:", curvature_symbolic_check())
    for k in (1, 2, 3):
        for eps in (0.0, 1e-2, 1.0):
            print("continuum lambda_1(k=%d, eps=%g) = %.12f" % (k, eps, dispersion_root(k, eps)))
