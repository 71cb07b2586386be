"""The dual equation v_t = 1/2 v_xx - 1/2 v^2, v(0) = lam 1_[0,N], and its mass.

At gamma = 1/2, E exp(-lam S_{N,t}) = exp(-<1, v(t)>) exactly, for every N.
"""

from shelab.analytic import dual_ode_w, mgf_rate
from shelab.dual import DualConfig, duality_sandwich, solve_dual

for N in (8, 25, 50, 100):
    cfg = DualConfig(lam=1.0, N=N, t=1.0, dx=0.01)
    sol = solve_dual(cfg)
    print(f"N={N:>3}: mass={sol.mass:9.4f}  mass/N={sol.mass / N:.4f}  (limit {-mgf_rate(1.0, 1.0):.4f})")

cfg = DualConfig(lam=1.0, N=60.0, t=1.0, dx=0.02)
sol = solve_dual(cfg)
mid = sol.v.values[len(sol.v.values) // 2]
print(f"window centre v = {mid:.6f}, ODE w(1) = {dual_ode_w(1.0, 1.0):.6f}")

cfg = DualConfig(lam=1.0, N=8.0, t=1.0)
sol = solve_dual(cfg)
lower, inner, upper, total = duality_sandwich(cfg, sol)
print(f"sandwich: {lower:.4f} <= {inner:.4f} (inside) ; {total:.4f} (total) <= {upper:.4f}")
print(f"so log E exp(-S_(8,1)) = {-total:.4f}")
