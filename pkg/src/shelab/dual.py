"""Deterministic dual equation v_t = 1/2 v_xx - 1/2 v^2 with v(0) = lam 1_[0,N].

At gamma = 1/2, E exp(-lam S_{N,t}) = exp(-<1, v(t)>), so the mass of ``v``
gives the exact log moment generating function at finite N.

The default scheme is Strang splitting: the reaction sub-flow is solved
exactly (v -> v / (1 + v h / 2)) and diffusion is Crank-Nicolson with
Rannacher start-up (the first step replaced by implicit Euler half steps)
to damp the indicator's jumps. Dirichlet zero data at both ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, linalg, special

from .analytic import dual_ode_w, heat_kernel
from .errors import CflViolation
from .lattice import FieldState

SCHEMES = ("imex", "explicit")
RANNACHER_HALF_STEPS = 4


@dataclass
class DualConfig:
    lam: float
    N: float
    t: float
    dx: float = 0.01
    dt: Optional[float] = None  # defaults to dx for imex, dx^2/2 for explicit
    buffer: Optional[float] = None  # defaults to 8 sqrt(t), at least 1
    scheme: str = "imex"

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.N <= 0 or self.t < 0 or self.dx <= 0:
            raise ValueError("need N > 0, t >= 0, dx > 0")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        min_buffer = 8.0 * math.sqrt(self.t)
        if self.buffer is None:
            self.buffer = max(min_buffer, 1.0)
        if self.buffer < min_buffer - 1e-12:
            raise ValueError(f"buffer {self.buffer} below 8 sqrt(t) = {min_buffer}")
        # snap the buffer to whole cells so 0 and N sit on cell edges when N/dx is integral
        self.buffer = math.ceil(self.buffer / self.dx - 1e-9) * self.dx
        if self.dt is None:
            self.dt = self.dx if self.scheme == "imex" else 0.5 * self.dx**2
        if self.scheme == "explicit" and self.dt > 0.5 * self.dx**2 * (1 + 1e-12):
            raise CflViolation(f"explicit dual scheme needs dt <= dx^2/2, got dt={self.dt}")

    @property
    def x_lo(self):
        return -self.buffer

    @property
    def x_hi(self):
        return self.N + self.buffer

    @property
    def n_cells(self):
        return int(round((self.x_hi - self.x_lo) / self.dx))

    @property
    def x(self):
        return self.x_lo + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def n_steps(self):
        return int(math.ceil(self.t / self.dt - 1e-9)) if self.t > 0 else 0


@dataclass
class DualSolution:
    v: FieldState
    x: np.ndarray
    dx: float
    mass: float
    per_step_masses: np.ndarray = field(default=None)

    def window_mass(self, a, b):
        m = (self.x >= a) & (self.x <= b)
        return self.dx * float(np.sum(self.v.values[m]))


def indicator_cell_average(config: DualConfig) -> np.ndarray:
    """lam * |cell ∩ [0, N]| / dx for every cell."""
    left = config.x - 0.5 * config.dx
    right = left + config.dx
    overlap = np.clip(np.minimum(right, config.N) - np.maximum(left, 0.0), 0.0, config.dx)
    return config.lam * overlap / config.dx


def _diffusion_bands(m, r):
    """Banded (1 - r D2) for solve_banded, D2 = tridiag(1, -2, 1)."""
    ab = np.empty((3, m))
    ab[0, :] = -r
    ab[1, :] = 1.0 + 2.0 * r
    ab[2, :] = -r
    return ab


def _apply_d2(v):
    out = -2.0 * v
    out[1:] += v[:-1]
    out[:-1] += v[1:]
    return out


def _react(v, h):
    return v / (1.0 + 0.5 * h * v)


def solve_dual(config: DualConfig, record_masses: bool = True) -> DualSolution:
    x = config.x
    dx = config.dx
    v = indicator_cell_average(config)
    masses = [dx * v.sum()]
    nsteps = config.n_steps
    dt = config.t / nsteps if nsteps else 0.0

    if config.scheme == "explicit":
        c = 0.5 * dt / dx**2
        for _ in range(nsteps):
            v = v + c * _apply_d2(v) - 0.5 * dt * v * v
            masses.append(dx * v.sum())
    else:
        m = v.size
        r_cn = 0.25 * dt / dx**2  # (dt/2) * (1/2) / dx^2
        ab_cn = _diffusion_bands(m, r_cn)
        n_half = RANNACHER_HALF_STEPS if nsteps else 0
        h_be = dt * min(1, nsteps) / max(n_half, 1)
        ab_be = _diffusion_bands(m, 0.5 * h_be / dx**2)
        for k in range(nsteps):
            v = _react(v, 0.5 * dt)
            if k == 0:
                for _ in range(n_half):
                    v = linalg.solve_banded((1, 1), ab_be, v, check_finite=False)
            else:
                rhs = v + r_cn * _apply_d2(v)
                v = linalg.solve_banded((1, 1), ab_cn, rhs, check_finite=False)
            v = _react(v, 0.5 * dt)
            if record_masses:
                masses.append(dx * v.sum())

    if v.size and v.min() < -1e-12 * max(config.lam, 1.0):
        raise FloatingPointError(f"dual solution went negative: min {v.min()}")
    v = np.clip(v, 0.0, None)
    mass = dx * float(np.sum(v))
    return DualSolution(
        v=FieldState(t=config.t, values=v),
        x=x,
        dx=dx,
        mass=mass,
        per_step_masses=np.array(masses) if record_masses else None,
    )


def heat_smoothed_indicator(config: DualConfig, x=None):
    """lam * int_0^N p_t(x - y) dy, the comparison bound on v."""
    x = config.x if x is None else np.asarray(x, dtype=float)
    if config.t == 0:
        return config.lam * ((x >= 0) & (x <= config.N)).astype(float)
    s = math.sqrt(config.t)
    return config.lam * (special.ndtr(x / s) - special.ndtr((x - config.N) / s))


def _hbar_quad(lam, N, t, x):
    s = math.sqrt(t)
    reach = 40.0 * s
    f = lambda y: heat_kernel(t, x - y)
    total = 0.0
    lo = min(0.0, x) - reach
    if lo < 0.0:
        total += integrate.quad(f, lo, 0.0, points=[x] if lo < x < 0 else None, epsabs=1e-13)[0]
    hi = max(N, x) + reach
    total += integrate.quad(f, N, hi, points=[x] if N < x < hi else None, epsabs=1e-13)[0]
    return lam * total


def supersolution_hbar(config: DualConfig, x=None, method: str = "quad") -> FieldState:
    """h_bar(t, x) = lam * int_{[0,N]^c} p_t(x - y) dy on the dual grid.

    ``method='quad'`` integrates the heat kernel numerically per point;
    ``method='closed'`` uses the normal CDF.
    """
    x = config.x if x is None else np.asarray(x, dtype=float)
    if config.t == 0:
        vals = config.lam * ((x < 0) | (x > config.N)).astype(float)
    elif method == "closed":
        s = math.sqrt(config.t)
        vals = config.lam * (special.ndtr(-x / s) + special.ndtr((x - config.N) / s))
    elif method == "quad":
        vals = np.array([_hbar_quad(config.lam, config.N, config.t, xi) for xi in x])
    else:
        raise ValueError(f"unknown method {method!r}")
    return FieldState(t=config.t, values=vals)


def duality_log_mgf(config: DualConfig, solution: Optional[DualSolution] = None) -> float:
    """log E exp(-lam S_{N,t}) = -<1, v(t)> (gamma = 1/2)."""
    if config.lam == 0:
        return 0.0
    sol = solution if solution is not None else solve_dual(config, record_masses=False)
    return -sol.mass


def duality_sandwich(config: DualConfig, solution: DualSolution):
    """Bounds from h = w - v <= h_bar and v <= heat-smoothed indicator.

    Returns ``(lower, inner, upper, total)`` where
    ``lower = N w - int_0^N h_bar <= inner = int_0^N v`` and
    ``total = <1, v> <= upper = N w + int_{[0,N]^c} lam 1_[0,N] * p_t``.
    """
    w = dual_ode_w(config.lam, config.t)
    x, dx = config.x, config.dx
    inside = (x >= 0) & (x <= config.N)
    hbar = supersolution_hbar(config, x=x[inside], method="closed").values
    lower = config.N * w - dx * float(np.sum(hbar))
    inner = dx * float(np.sum(solution.v.values[inside]))
    phi = heat_smoothed_indicator(config, x[~inside])
    upper = config.N * w + dx * float(np.sum(phi))
    return lower, inner, upper, solution.mass
