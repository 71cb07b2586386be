"""Explicit Euler-Maruyama scheme for du = 1/2 u_xx dt + sigma(u) dW on a periodic lattice.

One step reads::

    u'_j = max(0, u_j + dt/(2 dx^2) (u_{j+1} - 2 u_j + u_{j-1}) + sigma(u_j) w_j / dx)

with ``w_j ~ N(0, dt dx)`` the white-noise mass of cell ``j``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numba
import numpy as np

from .coefficients import CoefficientSpec, sigma
from .errors import OutOfDomain, ShapeMismatch
from .lattice import FieldState, GridSpec, SeedScheme, derive_stream, sample_noise_block

CHUNK_STEPS = 128
BUFFER_WIDTHS = 12.0  # domain must exceed the window by this many sqrt(T)


@dataclass
class SimConfig:
    grid: GridSpec
    coeff: CoefficientSpec
    T: float
    N: float
    record_times: Sequence[float] = ()
    u0: float = 1.0

    def __post_init__(self):
        if self.T < 0:
            raise ValueError("horizon T must be >= 0")
        room = self.grid.length - BUFFER_WIDTHS * math.sqrt(self.T)
        if not 0 < self.N <= room + 1e-9:
            raise ValueError(
                f"window N={self.N} must satisfy 0 < N <= L - 12 sqrt(T) = {room:.6g}"
            )
        if self.grid.x_lo > 1e-12 or self.N > self.grid.x_hi + 1e-12:
            raise ValueError("window [0, N] must lie inside the domain")
        if self.u0 < 0:
            raise ValueError("initial level must be nonnegative")
        times = list(self.record_times) or [self.T]
        snapped = sorted({self.grid.n_steps(t) for t in times})
        if snapped[0] < 0 or snapped[-1] > self.grid.n_steps(self.T):
            raise ValueError("record times must lie in [0, T]")
        self.record_steps = tuple(snapped)
        self.record_times = tuple(k * self.grid.dt for k in snapped)


@dataclass
class Trajectory:
    snapshots: list = field(default_factory=list)
    integrals: np.ndarray = None

    @property
    def times(self):
        return [s.t for s in self.snapshots]

    def to_csv(self, path, grid: GridSpec):
        with open(path, "w", newline="") as fh:
            write_snapshots_csv(fh, self.snapshots, grid)


def write_snapshots_csv(fh, snapshots, grid: GridSpec):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "x", "u"])
    x = grid.x
    for s in snapshots:
        for xi, ui in zip(x, s.values):
            w.writerow([repr(float(s.t)), repr(float(xi)), repr(float(ui))])


def step(state: FieldState, grid: GridSpec, coeff: CoefficientSpec, noise_layer) -> FieldState:
    state.check_grid(grid)
    w = np.asarray(noise_layer, dtype=float)
    if w.shape != state.values.shape:
        raise ShapeMismatch(f"noise layer shape {w.shape} != field shape {state.values.shape}")
    u = state.values
    c = grid.dt / (2.0 * grid.dx**2)
    lap = np.roll(u, -1) - 2.0 * u + np.roll(u, 1)
    new = u + c * lap + sigma(u, coeff) * w / grid.dx
    new = np.maximum(new, 0.0)
    return FieldState(t=state.t + grid.dt, values=new)


@numba.njit(cache=True)
def _sigma_scalar(u, gamma, n):
    if n <= 0:
        return math.sqrt(u) if gamma == 0.5 else u**gamma
    if u > 1.0 / n:
        base = math.sqrt(u) if gamma == 0.5 else u**gamma
    else:
        base = n ** (1.0 - gamma) * u
    s = (u - n) / 2.0
    if s <= 0.0:
        return base
    if s >= 1.0:
        return 0.0
    return (1.0 - s * s * (3.0 - 2.0 * s)) * base


@numba.njit(cache=True)
def _advance(u, noise, dt, dx, gamma, n):
    """Apply ``noise.shape[0]`` steps to ``u`` in place."""
    m = u.shape[0]
    c = dt / (2.0 * dx * dx)
    new = np.empty(m)
    for k in range(noise.shape[0]):
        for j in range(m):
            left = u[j - 1] if j > 0 else u[m - 1]
            right = u[j + 1] if j < m - 1 else u[0]
            lap = right - 2.0 * u[j] + left
            v = u[j] + c * lap + _sigma_scalar(u[j], gamma, n) * noise[k, j] / dx
            new[j] = v if v > 0.0 else 0.0
        u[:] = new


def iterate_path(config: SimConfig, seed: SeedScheme) -> Iterator[FieldState]:
    """Yield the field at each record time of one path."""
    grid = config.grid
    stream = derive_stream(seed)
    u = np.full(grid.n_cells, float(config.u0))
    n_reg = config.coeff.n if config.coeff.regularized else 0
    done = 0
    for target in config.record_steps:
        while done < target:
            k = min(CHUNK_STEPS, target - done)
            noise = sample_noise_block(grid, stream, k)
            _advance(u, noise, grid.dt, grid.dx, config.coeff.gamma, n_reg)
            done += k
        yield FieldState(t=done * grid.dt, values=u.copy())


def simulate(config: SimConfig, seed: SeedScheme) -> Trajectory:
    snaps = list(iterate_path(config, seed))
    ints = np.array([spatial_integral(s, config.grid, 0.0, config.N) for s in snaps])
    return Trajectory(snapshots=snaps, integrals=ints)


def window_slice(grid: GridSpec, a: float, b: float) -> slice:
    """Cells whose centres lie in ``[a, b]``."""
    tol = 1e-9 * grid.dx
    if a > b or a < grid.x_lo - tol or b > grid.x_hi + tol:
        raise OutOfDomain(f"[{a}, {b}] not inside [{grid.x_lo}, {grid.x_hi}]")
    lo = int(math.ceil((a - grid.x_lo) / grid.dx - 0.5 - 1e-9))
    hi = int(math.floor((b - grid.x_lo) / grid.dx - 0.5 + 1e-9)) + 1
    return slice(max(lo, 0), min(hi, grid.n_cells))


def spatial_integral(state: FieldState, grid: GridSpec, a: float, b: float) -> float:
    return grid.dx * float(np.sum(state.values[window_slice(grid, a, b)]))


def block_sums(snapshots: Sequence[FieldState], grid: GridSpec, a_weights, block_edges) -> np.ndarray:
    """X_j = integral over [e_{j-1}, e_j] of sum_l (a_l u(t_l, x) - 1) dx."""
    a = np.asarray(a_weights, dtype=float)
    if len(a) != len(snapshots):
        raise ShapeMismatch("one weight per snapshot required")
    combo = sum(al * s.values - 1.0 for al, s in zip(a, snapshots))
    edges = list(block_edges)
    out = np.empty(len(edges) - 1)
    for j in range(len(edges) - 1):
        out[j] = grid.dx * np.sum(combo[window_slice(grid, edges[j], edges[j + 1])])
    return out
