"""Path-parallel ensembles with per-path online reduction."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..lattice import SeedScheme
from ..solver import SimConfig, iterate_path, window_slice

MIN_PATHS = 100


@dataclass
class EnsembleConfig:
    sim: SimConfig
    paths: int
    seed: int
    tests: frozenset = frozenset()
    windows: Optional[Sequence[float]] = None  # window lengths N with S_{N,t} recorded
    keep_fields: bool = True
    min_paths: int = MIN_PATHS

    def __post_init__(self):
        if self.paths < self.min_paths:
            raise ValueError(f"ensemble needs at least {self.min_paths} paths, got {self.paths}")
        self.tests = frozenset(self.tests)
        self.windows = tuple(self.windows) if self.windows else (self.sim.N,)
        for n in self.windows:
            window_slice(self.sim.grid, 0.0, n)


@dataclass
class EnsembleStore:
    """Raw per-path statistics; row ``p`` always belongs to path index ``p``."""

    config: EnsembleConfig
    times: tuple
    windows: tuple
    integrals: np.ndarray  # (paths, times, windows): S_{N,t}
    fields: Optional[np.ndarray] = None  # (paths, times, cells) when kept
    meta: dict = field(default_factory=dict)

    @property
    def grid(self):
        return self.config.sim.grid

    @property
    def paths(self):
        return self.integrals.shape[0]

    def time_index(self, t: float) -> int:
        i = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        if abs(self.times[i] - t) > 0.5 * self.grid.dt:
            raise KeyError(f"time {t} was not recorded (have {self.times})")
        return i

    def window_index(self, n: float) -> int:
        for i, w in enumerate(self.windows):
            if abs(w - n) < 1e-9:
                return i
        raise KeyError(f"window {n} was not recorded (have {self.windows})")

    def S(self, t: float, N: Optional[float] = None) -> np.ndarray:
        N = self.config.sim.N if N is None else N
        return self.integrals[:, self.time_index(t), self.window_index(N)]

    def field_at(self, t: float) -> np.ndarray:
        if self.fields is None:
            raise ValueError("ensemble was run without keep_fields")
        return self.fields[:, self.time_index(t), :]

    def subset(self, paths: int) -> "EnsembleStore":
        """First ``paths`` paths (nested subsample)."""
        return EnsembleStore(
            config=self.config,
            times=self.times,
            windows=self.windows,
            integrals=self.integrals[:paths],
            fields=None if self.fields is None else self.fields[:paths],
            meta=dict(self.meta, paths=paths),
        )


def _run_block(config: EnsembleConfig, start: int, stop: int):
    sim = config.sim
    grid = sim.grid
    slices = [window_slice(grid, 0.0, n) for n in config.windows]
    nt = len(sim.record_steps)
    ints = np.empty((stop - start, nt, len(slices)))
    fields = np.empty((stop - start, nt, grid.n_cells)) if config.keep_fields else None
    for row, p in enumerate(range(start, stop)):
        for i, state in enumerate(iterate_path(sim, SeedScheme(config.seed, p))):
            for k, sl in enumerate(slices):
                ints[row, i, k] = grid.dx * np.sum(state.values[sl])
            if fields is not None:
                fields[row, i] = state.values
    return ints, fields


def _blocks(paths: int, workers: int):
    edges = np.linspace(0, paths, workers + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def default_workers() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def run_ensemble(config: EnsembleConfig, workers: Optional[int] = None) -> EnsembleStore:
    """Simulate ``config.paths`` paths; output is independent of ``workers``."""
    workers = default_workers() if workers is None else max(1, int(workers))
    blocks = _blocks(config.paths, workers)
    if workers == 1 or len(blocks) == 1:
        parts = [_run_block(config, a, b) for a, b in blocks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_block, config, a, b) for a, b in blocks]
            parts = [f.result() for f in futures]
    ints = np.concatenate([p[0] for p in parts])
    fields = np.concatenate([p[1] for p in parts]) if config.keep_fields else None
    grid = config.sim.grid
    meta = dict(paths=config.paths, dx=grid.dx, dt=grid.dt, L=grid.length, seed=config.seed,
                gamma=config.sim.coeff.gamma)
    return EnsembleStore(config, tuple(config.sim.record_times), tuple(config.windows), ints, fields, meta)
