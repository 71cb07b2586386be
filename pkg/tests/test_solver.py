import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shelab.coefficients import CoefficientSpec
from shelab.ensemble.stats import mean_se, ols, var_se
from shelab.errors import OutOfDomain, ShapeMismatch
from shelab.lattice import FieldState, SeedScheme, derive_stream, make_grid, sample_noise_layer
from shelab.solver import (SimConfig, block_sums, iterate_path, simulate, spatial_integral, step,
                           window_slice, write_snapshots_csv)

HALF = CoefficientSpec(0.5)


def small_config(T=0.1, N=2.0, record_times=(), dx=0.1, gamma=0.5, n=None):
    L = N + 12 * math.sqrt(T) + 1
    grid = make_grid(0.0, math.ceil(L / dx) * dx, dx, dx * dx / 2)
    return SimConfig(grid, CoefficientSpec(gamma, n), T=T, N=N, record_times=record_times)


def test_constant_field_unchanged_without_noise():
    g = make_grid(0, 2, 0.1, 0.005)
    s = FieldState.constant(g, 3.0)
    out = step(s, g, HALF, np.zeros(g.n_cells))
    np.testing.assert_array_equal(out.values, s.values)
    assert out.t == pytest.approx(g.dt)


def test_zero_is_absorbing():
    g = make_grid(0, 2, 0.1, 0.005)
    noise = sample_noise_layer(g, derive_stream(SeedScheme(1, 0)))
    out = step(FieldState.constant(g, 0.0), g, HALF, noise * 1e3)
    assert np.all(out.values == 0.0)


def test_step_shape_mismatch():
    g = make_grid(0, 2, 0.1, 0.005)
    with pytest.raises(ShapeMismatch):
        step(FieldState.constant(g), g, HALF, np.zeros(3))


def test_step_formula_by_hand():
    g = make_grid(0, 0.4, 0.1, 0.005)
    u = np.array([1.0, 4.0, 0.0, 9.0])
    w = np.array([0.01, -0.02, 0.5, -0.1])
    c = g.dt / (2 * g.dx**2)
    expect = [1 + c * (4 - 2 + 9) + 1 * 0.01 / 0.1,
              4 + c * (0 - 8 + 1) + 2 * -0.02 / 0.1,
              0 + c * (9 + 4),
              max(0.0, 9 + c * (1 - 18 + 0) + 3 * -0.1 / 0.1)]
    out = step(FieldState(0.0, u), g, HALF, w)
    np.testing.assert_allclose(out.values, expect, rtol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.floats(0.0, 50.0))
def test_step_preserves_nonnegativity(seed, scale):
    g = make_grid(0, 1, 0.1, 0.005)
    rng = np.random.default_rng(seed)
    u = rng.exponential(2.0, g.n_cells)
    out = step(FieldState(0.0, u), g, HALF, scale * rng.standard_normal(g.n_cells))
    assert np.all(out.values >= 0)


def test_compiled_path_matches_reference_step():
    cfg = small_config(T=0.05, record_times=(0.02, 0.05))
    g = cfg.grid
    for n in (None, 3):
        cfg.coeff = CoefficientSpec(0.5, n)
        fast = [s.values for s in iterate_path(cfg, SeedScheme(8, 2))]
        stream = derive_stream(SeedScheme(8, 2))
        s = FieldState.constant(g)
        ref = []
        for k in range(1, cfg.record_steps[-1] + 1):
            s = step(s, g, cfg.coeff, sample_noise_layer(g, stream))
            if k in cfg.record_steps:
                ref.append(s.values)
        for a, b in zip(fast, ref):
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)


def test_T_zero_single_unit_snapshot():
    traj = simulate(small_config(T=0.0, N=3.0), SeedScheme(1, 0))
    assert len(traj.snapshots) == 1
    assert np.all(traj.snapshots[0].values == 1.0)
    assert traj.integrals[0] == pytest.approx(3.0, abs=1e-12)


def test_same_seed_identical_trajectory():
    cfg = small_config(record_times=(0.05, 0.1))
    a, b = simulate(cfg, SeedScheme(99, 4)), simulate(cfg, SeedScheme(99, 4))
    for s1, s2 in zip(a.snapshots, b.snapshots):
        np.testing.assert_array_equal(s1.values, s2.values)
    np.testing.assert_array_equal(a.integrals, b.integrals)
    c = simulate(cfg, SeedScheme(99, 5))
    assert not np.array_equal(a.snapshots[-1].values, c.snapshots[-1].values)


def test_trajectory_invariants():
    traj = simulate(small_config(record_times=(0.03, 0.1)), SeedScheme(3, 0))
    assert all(np.all(s.values >= 0) for s in traj.snapshots)
    assert np.all(traj.integrals >= 0)
    assert traj.times == pytest.approx([0.03, 0.1])


def test_record_times_snap_to_dt():
    cfg = small_config(T=0.1, record_times=(0.0512, 0.1))
    assert all(abs(t / cfg.grid.dt - round(t / cfg.grid.dt)) < 1e-9 for t in cfg.record_times)
    with pytest.raises(ValueError):
        small_config(T=0.1, record_times=(0.2,))


def test_buffer_rule():
    g = make_grid(0, 10, 0.1, 0.005)
    SimConfig(g, HALF, T=0.25, N=4.0)
    with pytest.raises(ValueError, match="12 sqrt"):
        SimConfig(g, HALF, T=0.25, N=4.5)
    with pytest.raises(ValueError):
        SimConfig(g, HALF, T=0.25, N=0.0)


def test_spatial_integral_examples():
    g = make_grid(0, 1, 0.25, 0.25**2 / 2)
    assert spatial_integral(FieldState.constant(g), g, 0, 1) == 1.0
    assert spatial_integral(FieldState.constant(g, 2.5), g, 0, 0.5) == pytest.approx(1.25)
    # triangle 1 - |2x - 1| at the centres 1/8, 3/8, 5/8, 7/8 -> 1/4, 3/4, 3/4, 1/4
    x = g.x
    tri = FieldState(0.0, 1 - np.abs(2 * x - 1))
    assert spatial_integral(tri, g, 0, 1) == pytest.approx(0.25 * (0.25 + 0.75 + 0.75 + 0.25))
    with pytest.raises(OutOfDomain):
        spatial_integral(tri, g, -0.5, 1)
    with pytest.raises(OutOfDomain):
        spatial_integral(tri, g, 0.5, 2)


def test_window_slice_counts_cells():
    g = make_grid(0, 10, 0.05, 0.00125)
    sl = window_slice(g, 0, 8)
    assert sl.stop - sl.start == 160


def test_block_sums_constant_fields():
    g = make_grid(0, 4, 0.1, 0.005)
    one = FieldState.constant(g)
    np.testing.assert_allclose(block_sums([one], g, [1.0], [0, 1, 2, 3]), 0.0, atol=1e-12)
    np.testing.assert_allclose(block_sums([one], g, [2.0], [0, 1, 2, 3]), 1.0, atol=1e-12)


def test_block_sums_total_matches_window_integral():
    cfg = small_config(T=0.1, N=4.0, record_times=(0.05, 0.1))
    traj = simulate(cfg, SeedScheme(12, 0))
    g = cfg.grid
    edges = [0, 1, 2, 3, 4]
    X = block_sums(traj.snapshots[-1:], g, [1.0], edges)
    assert X.sum() == pytest.approx(traj.integrals[-1] - 4.0, abs=1e-12)
    a = [0.7, 1.9]
    X2 = block_sums(traj.snapshots, g, a, edges)
    expect = sum(al * S for al, S in zip(a, traj.integrals)) - len(a) * 4.0
    assert X2.sum() == pytest.approx(expect, abs=1e-12)
    with pytest.raises(ShapeMismatch):
        block_sums(traj.snapshots, g, [1.0], edges)


def test_snapshot_csv_layout():
    traj = simulate(small_config(T=0.01, N=1.0, record_times=(0.0, 0.01)), SeedScheme(0, 0))
    buf = io.StringIO()
    write_snapshots_csv(buf, traj.snapshots, small_config(T=0.01, N=1.0).grid)
    lines = buf.getvalue().splitlines()
    n = small_config(T=0.01, N=1.0).grid.n_cells
    assert lines[0] == "t,x,u"
    assert len(lines) == 1 + 2 * n
    t, x, u = map(float, lines[1 + n].split(","))
    assert t == pytest.approx(0.01) and x == pytest.approx(0.05) and u >= 0


def test_other_gamma_invariants():
    for g, n in ((0.3, None), (0.8, None), (0.8, 4)):
        traj = simulate(small_config(T=0.1, gamma=g, n=n, record_times=(0.05, 0.1)), SeedScheme(5, 1))
        assert all(np.all(s.values >= 0) and np.all(np.isfinite(s.values)) for s in traj.snapshots)


# ---------------------------------------------------------------- ensemble properties

def test_mean_one_at_quarter_time(medium_store):
    u = medium_store.field_at(0.25)[:, medium_store.grid.cell_index(0.0)]
    m, se = mean_se(u)
    assert abs(m - 1) <= 5 * se


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
def test_mean_one_single_point_all_times(medium_store, t):
    u = medium_store.field_at(t)[:, medium_store.grid.cell_index(1.0)]
    m, se = mean_se(u)
    assert abs(m - 1) <= 5 * se


def test_clamping_bias_is_small_and_upward(medium_store):
    # averaging over all cells shrinks the error bar enough to expose the bias
    # from clamping at zero; it is O(sqrt dx) and stays below 3% at dx = 0.05
    m, se = mean_se(medium_store.field_at(1.0).mean(axis=1))
    assert -3 * se <= m - 1 <= 0.03


def test_variance_growth_half_time(shared_store):
    N = shared_store.config.sim.N
    v, se = var_se(shared_store.S(0.5) - N)
    assert abs(v / N - 0.5) <= 0.15 * 0.5


def test_second_moment_growth_slope(medium_store):
    ts = np.array(medium_store.times)
    sel = (ts >= 0.1 - 1e-9) & (ts <= 1 + 1e-9)
    m2 = np.array([np.mean(medium_store.field_at(t) ** 2) for t in ts[sel]])
    assert np.all(np.isfinite(m2))
    slope = ols(np.log(ts[sel]), np.log(m2))[0]
    assert slope <= 1 / (2 * (1 - 0.5)) + 0.2


def test_increment_regularity(medium_store):
    N = 2.0
    ts = medium_store.times
    gaps, ratios = [], []
    for i, s in enumerate(ts):
        for t in ts[i + 1:]:
            v, _ = var_se(medium_store.S(t, N) - medium_store.S(s, N))
            gaps.append(t - s)
            ratios.append(v / (N * (t - s)))
    C = max(ratios)
    # one constant works for every pair; it is of order one, not growing as |t - s| shrinks
    assert C < 2.0
    assert min(ratios) > 0.2
    small = [r for g, r in zip(gaps, ratios) if g <= 0.11]
    assert max(small) <= C
