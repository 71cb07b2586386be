"""The coefficient u^gamma and its Lipschitz, compactly supported approximations sigma_n."""

import numpy as np

from shelab.coefficients import CoefficientSpec, psi, sigma_exact, sigma_n, sigma_n_sup_error

x = np.linspace(0, 12, 9)
print("x        :", np.round(x, 2))
print("x^0.5    :", np.round(sigma_exact(x, 0.5), 4))
for n in (2, 8):
    print(f"sigma_{n:<2} :", np.round(sigma_n(x, CoefficientSpec(0.5, n)), 4))

# The cutoff psi_n equals 1 on [-n, n] and vanishes beyond n + 2.
print("psi_4 at 3, 5, 6, 7:", [float(psi(v, 4)) for v in (3, 5, 6, 7)])

# The uniform error on [0, n] is bounded by n^-gamma (gamma^(gamma/(1-gamma)) - gamma^(1/(1-gamma))).
for g in (0.3, 0.5, 0.8):
    for n in (1, 4, 16):
        spec = CoefficientSpec(g, n)
        grid = np.linspace(0, n, 200001)
        err = np.abs(sigma_n(grid, spec) - grid**g).max()
        print(f"gamma={g} n={n:>2}: max error {err:.6f} <= bound {sigma_n_sup_error(spec):.6f}")
