"""Closed-form oracles: covariance, dual ODE, rate functions."""

import numpy as np
from scipy import optimize

from shelab.analytic import (cov_bound, cov_exact_half, cov_exact_half_closed, dual_ode_w, lower_tail_rate,
                             mgf_rate)

t = 0.5
print("Cov(u(t,x), u(t,0)) at t = 1/2 (quadrature, closed form, bound):")
for x in (0.0, 0.25, 0.5, 1.0, 2.0):
    print(f"  x={x:4}: {cov_exact_half(t, x):.6f}  {cov_exact_half_closed(t, x):.6f}  "
          f"{cov_bound(t, x, np.sqrt(t / np.pi)):.6f}")

print("w(t) = 2 lam / (lam t + 2) solves w' = -w^2/2:", dual_ode_w(2.0, 1.0))
print("mgf_rate(2, 1) =", mgf_rate(2.0, 1.0), " lower_tail_rate(1/4, 1) =", lower_tail_rate(0.25, 1.0))

# The lower-tail rate is the envelope min_lam [lam a + mgf_rate(lam, t)].
for a in (0.1, 0.5, 0.9):
    res = optimize.minimize_scalar(lambda lam: lam * a + mgf_rate(lam, 1.0), bounds=(1e-9, 1e3), method="bounded")
    print(f"a={a}: envelope {res.fun:.6f}  formula {lower_tail_rate(a, 1.0):.6f}")
