"""Closed-form reference quantities used as oracles by the ensemble checks."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from .errors import BadRange, BadTime

QUAD_EPSABS = 1e-10


def heat_kernel(t, x):
    """Gaussian density p_t(x) = (2 pi t)^(-1/2) exp(-x^2 / 2t)."""
    if np.any(np.asarray(t) <= 0):
        raise BadTime(f"heat kernel needs t > 0, got {t}")
    x = np.asarray(x, dtype=float)
    out = np.exp(-(x**2) / (2.0 * t)) / np.sqrt(2.0 * np.pi * t)
    return out if out.ndim else float(out)


def cov_exact_half(t: float, x: float, moment=None) -> float:
    """Spatial covariance Cov(u(t,x), u(t,0)) = int_0^t m(s) p_{2(t-s)}(x) ds.

    ``m(s) = E[u(s,0)^(2 gamma)]`` is identically 1 when gamma = 1/2 (the
    default). Other gammas may pass an estimated moment curve ``moment(s)``.
    Evaluated by adaptive Gauss-Kronrod quadrature.
    """
    if t <= 0:
        raise BadTime(f"covariance needs t > 0, got {t}")
    # substitute t - s = q^2: removes the s = t singularity of p_{2(t-s)}(0)
    def f(q):
        g = math.exp(-x * x / (4.0 * q * q)) / math.sqrt(math.pi) if q > 0 else (0.0 if x else 1.0 / math.sqrt(math.pi))
        return g if moment is None else moment(t - q * q) * g

    val, _ = integrate.quad(f, 0.0, math.sqrt(t), epsabs=QUAD_EPSABS, epsrel=1e-12, limit=200)
    return val


def cov_exact_half_closed(t: float, x):
    """Closed form of :func:`cov_exact_half` at gamma = 1/2.

    sqrt(t/pi) exp(-x^2/4t) - (|x|/2) erfc(|x| / (2 sqrt t)).
    """
    if t <= 0:
        raise BadTime(f"covariance needs t > 0, got {t}")
    ax = np.abs(np.asarray(x, dtype=float))
    out = np.sqrt(t / np.pi) * np.exp(-(ax**2) / (4.0 * t)) - 0.5 * ax * special.erfc(ax / (2.0 * np.sqrt(t)))
    return out if out.ndim else float(out)


def cov_bound(T: float, x, C_T: float):
    x = np.asarray(x, dtype=float)
    out = C_T * np.exp(-(x**2) / (4.0 * T))
    return out if out.ndim else float(out)


def dual_ode_w(lam, t):
    """Solution of w' = -w^2/2, w(0) = lam."""
    return 2.0 * lam / (lam * t + 2.0)


def mgf_rate(lam, t):
    """Limit of (1/N) log E exp(-lam S_{N,t}) at gamma = 1/2."""
    return -2.0 * lam / (lam * t + 2.0)


def lower_tail_rate(a: float, t: float) -> float:
    """Upper bound on limsup (1/N) log P(S_{N,t}/N < a), gamma = 1/2."""
    if not 0 < a < 1:
        raise BadRange(f"a must lie in (0, 1), got {a}")
    if t <= 0:
        raise BadTime(f"t must be positive, got {t}")
    return -2.0 * (1.0 - math.sqrt(a)) ** 2 / t
