"""Space-time lattice, field container and per-path noise streams.

Noise streams are Philox (counter-based) generators keyed through
:class:`numpy.random.SeedSequence` with ``spawn_key=(path_index,)``, so the
stream of path ``p`` is available without touching paths ``0..p-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadDomain, CflViolation, ShapeMismatch

BOUNDARIES = ("periodic",)


@dataclass(frozen=True)
class GridSpec:
    dx: float
    dt: float
    x_lo: float
    x_hi: float
    boundary: str = "periodic"
    n_cells: int = field(init=False)

    def __post_init__(self):
        if not (self.x_hi > self.x_lo):
            raise BadDomain(f"x_hi={self.x_hi} must exceed x_lo={self.x_lo}")
        if not (self.dx > 0):
            raise BadDomain(f"dx must be positive, got {self.dx}")
        if not (self.dt > 0):
            raise BadDomain(f"dt must be positive, got {self.dt}")
        if self.boundary not in BOUNDARIES:
            raise BadDomain(f"unsupported boundary {self.boundary!r}")
        n = int(round((self.x_hi - self.x_lo) / self.dx))
        if n < 4:
            raise BadDomain(f"domain holds {n} cells, need at least 4")
        # relative slack so that dt = dx**2/2 computed in floating point passes
        if self.dt > 0.5 * self.dx**2 * (1 + 1e-12):
            raise CflViolation(
                f"CFL rule dt <= dx^2/2 violated: dt={self.dt} > {0.5 * self.dx**2}"
            )
        object.__setattr__(self, "n_cells", n)

    @property
    def length(self) -> float:
        return self.n_cells * self.dx

    @property
    def x(self) -> np.ndarray:
        """Cell centres."""
        return self.x_lo + (np.arange(self.n_cells) + 0.5) * self.dx

    def cell_index(self, x: float) -> int:
        """Index of the cell containing ``x`` (periodic wrap)."""
        j = int(math.floor((x - self.x_lo) / self.dx + 1e-9))
        return j % self.n_cells

    def n_steps(self, t: float) -> int:
        """Number of time steps needed to reach ``t`` (snapped to the grid)."""
        return int(round(t / self.dt))


def make_grid(x_lo: float, x_hi: float, dx: float, dt: float, boundary: str = "periodic") -> GridSpec:
    return GridSpec(dx=dx, dt=dt, x_lo=x_lo, x_hi=x_hi, boundary=boundary)


@dataclass
class FieldState:
    t: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ShapeMismatch("field values must be one-dimensional")
        if np.any(self.values < 0):
            raise ValueError("field values must be nonnegative")

    def check_grid(self, grid: GridSpec):
        if self.values.shape[0] != grid.n_cells:
            raise ShapeMismatch(
                f"field has {self.values.shape[0]} cells, grid has {grid.n_cells}"
            )

    @classmethod
    def constant(cls, grid: GridSpec, c: float = 1.0, t: float = 0.0) -> "FieldState":
        return cls(t=t, values=np.full(grid.n_cells, float(c)))


@dataclass(frozen=True)
class SeedScheme:
    master_seed: int
    path_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.path_index < 0:
            raise ValueError("path_index must be >= 0")


def derive_stream(seed: SeedScheme) -> np.random.Generator:
    ss = np.random.SeedSequence(seed.master_seed, spawn_key=(seed.path_index,))
    return np.random.Generator(np.random.Philox(ss))


def noise_scale(grid: GridSpec) -> float:
    """Standard deviation of the white-noise mass of one space-time cell."""
    return math.sqrt(grid.dt * grid.dx)


def sample_noise_layer(grid: GridSpec, stream: np.random.Generator) -> np.ndarray:
    return stream.standard_normal(grid.n_cells) * noise_scale(grid)


def sample_noise_block(grid: GridSpec, stream: np.random.Generator, n_steps: int) -> np.ndarray:
    """``n_steps`` consecutive noise layers, shape ``(n_steps, n_cells)``.

    Draws the same numbers as ``n_steps`` calls to :func:`sample_noise_layer`.
    """
    return stream.standard_normal((n_steps, grid.n_cells)) * noise_scale(grid)
