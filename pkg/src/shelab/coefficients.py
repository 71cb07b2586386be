"""Diffusion coefficient x**gamma and its Lipschitz regularisations sigma_n.

``sigma_n(x) = psi_n(x) * (|x|**gamma if |x| > 1/n else n**(1-gamma) * |x|)``
where ``psi_n`` is an even C^1 cutoff equal to 1 on ``[-n, n]`` and 0 outside
``(-n-2, n+2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NegativeInput


@dataclass(frozen=True)
class CoefficientSpec:
    gamma: float = 0.5
    n: Optional[int] = None  # None means the exact coefficient x**gamma

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.n is not None and (int(self.n) != self.n or self.n < 1):
            raise ValueError(f"regularisation index must be an integer >= 1, got {self.n}")

    @property
    def regularized(self) -> bool:
        return self.n is not None


def sigma_exact(x, gamma):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise NegativeInput("sigma_exact is defined for x >= 0 only")
    out = np.power(x, gamma)
    return out if out.ndim else float(out)


def psi(x, n):
    """Cubic-smoothstep cutoff: 1 on [-n, n], 0 for |x| >= n + 2, |psi'| <= 3/4."""
    ax = np.abs(np.asarray(x, dtype=float))
    s = np.clip((ax - n) / 2.0, 0.0, 1.0)
    out = 1.0 - s * s * (3.0 - 2.0 * s)
    return out if out.ndim else float(out)


def sigma_n(x, spec: CoefficientSpec):
    if not spec.regularized:
        raise ValueError("sigma_n needs a regularised CoefficientSpec (n >= 1)")
    n, g = spec.n, spec.gamma
    ax = np.abs(np.asarray(x, dtype=float))
    with np.errstate(divide="ignore"):
        power = np.power(ax, g)
    base = np.where(ax > 1.0 / n, power, n ** (1.0 - g) * ax)
    out = psi(ax, n) * base
    return out if np.ndim(out) else float(out)


def sigma(x, spec: CoefficientSpec):
    """Coefficient the solver uses: exact power or sigma_n."""
    return sigma_n(x, spec) if spec.regularized else sigma_exact(x, spec.gamma)


def sigma_n_sup_error(spec: CoefficientSpec) -> float:
    """Bound on sup_{|x| <= n} |sigma_n(x) - |x|**gamma|.

    The maximum is attained on the linear branch at x = gamma**(1/(1-gamma)) / n,
    so the bound is sharp.
    """
    if not spec.regularized:
        raise ValueError("sup-error bound needs a regularised spec")
    g = spec.gamma
    return spec.n ** (-g) * (g ** (g / (1 - g)) - g ** (1 / (1 - g)))
