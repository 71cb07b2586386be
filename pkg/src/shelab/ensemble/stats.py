"""Estimators with standard errors. Sums go through math.fsum so results do
not depend on how paths were split across workers."""

from __future__ import annotations

import math

import numpy as np


def fmean(x) -> float:
    x = np.asarray(x, dtype=float).ravel()
    return math.fsum(x) / x.size


def mean_se(x):
    x = np.asarray(x, dtype=float).ravel()
    m = fmean(x)
    if x.size < 2:
        return m, float("nan")
    return m, math.sqrt(math.fsum((x - m) ** 2) / (x.size - 1) / x.size)


def var_se(x):
    """Sample variance and its standard error from the influence function."""
    x = np.asarray(x, dtype=float).ravel()
    m = fmean(x)
    d2 = (x - m) ** 2
    v = math.fsum(d2) / (x.size - 1)
    _, se = mean_se(d2 - v)
    return v, se


def cov_from_path_means(a, b, c):
    """Covariance E[AB] - E[A]E[B] from per-path averages a_p, b_p, c_p = (AB)_p.

    The standard error uses the delta-method influence c - mean(b) a - mean(a) b.
    """
    ma, mb, mc = fmean(a), fmean(b), fmean(c)
    est = mc - ma * mb
    infl = np.asarray(c) - mb * np.asarray(a) - ma * np.asarray(b)
    _, se = mean_se(infl)
    return est, se, infl


def sample_cov_se(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    est, se, _ = cov_from_path_means(x, y, x * y)
    n = x.size
    return est * n / (n - 1), se


def ols(x, y, w=None):
    """Weighted least squares line; returns slope, intercept, slope_se, r2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.ones_like(x) if w is None else np.asarray(w, dtype=float)
    xm = np.sum(w * x) / np.sum(w)
    ym = np.sum(w * y) / np.sum(w)
    sxx = np.sum(w * (x - xm) ** 2)
    slope = np.sum(w * (x - xm) * (y - ym)) / sxx
    icpt = ym - slope * xm
    resid = y - (icpt + slope * x)
    sst = np.sum(w * (y - ym) ** 2)
    r2 = 1.0 - np.sum(w * resid**2) / sst if sst > 0 else 1.0
    dof = max(x.size - 2, 1)
    slope_se = math.sqrt(np.sum(w * resid**2) / dof / sxx) if x.size > 2 else float("nan")
    return float(slope), float(icpt), slope_se, float(r2)


def slope_with_known_errors(x, y, y_se):
    """Weighted regression slope whose SE propagates the given per-point errors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = 1.0 / np.asarray(y_se, dtype=float) ** 2
    xm = np.sum(w * x) / np.sum(w)
    sxx = np.sum(w * (x - xm) ** 2)
    slope = np.sum(w * (x - xm) * y) / sxx
    return float(slope), float(1.0 / math.sqrt(sxx))
