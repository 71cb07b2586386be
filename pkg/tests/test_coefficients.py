import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shelab.coefficients import CoefficientSpec, psi, sigma, sigma_exact, sigma_n, sigma_n_sup_error
from shelab.errors import NegativeInput


@pytest.mark.parametrize("x,g,expected", [(0, 0.3, 0.0), (1, 0.5, 1.0), (4, 0.5, 2.0)])
def test_sigma_exact(x, g, expected):
    assert sigma_exact(x, g) == expected


def test_sigma_exact_rejects_negative():
    with pytest.raises(NegativeInput):
        sigma_exact(-0.1, 0.5)


@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_psi_anchor_values(n):
    assert psi(n / 2, n) == 1.0
    assert psi(n, n) == 1.0
    assert psi(n + 2, n) == 0.0
    assert psi(n + 7, n) == 0.0
    # midpoint of the smoothstep: 1 - (3/4 - 2/8)
    assert psi(n + 1, n) == pytest.approx(0.5)


@given(st.floats(-50, 50, allow_nan=False), st.integers(1, 20))
def test_psi_even_and_bounded(x, n):
    v = psi(x, n)
    assert 0.0 <= v <= 1.0
    assert v == psi(-x, n)


@pytest.mark.parametrize("n", [1, 3, 8])
def test_psi_slope_bounded_by_one(n):
    x = np.linspace(-n - 3, n + 3, 200001)
    slope = np.abs(np.diff(psi(x, n)) / np.diff(x))
    assert slope.max() <= 0.75 + 1e-6
    # continuous derivative: no jump at the junctions
    h = 1e-6
    for x0 in (n, n + 2):
        left = (psi(x0, n) - psi(x0 - h, n)) / h
        right = (psi(x0 + h, n) - psi(x0, n)) / h
        assert abs(left - right) < 1e-4


def test_sigma_n_examples():
    spec = CoefficientSpec(0.5, 4)
    assert sigma_n(0.0, spec) == 0.0
    assert sigma_n(2.0, spec) == pytest.approx(np.sqrt(2))
    for g in (0.3, 0.5, 0.8):
        s = CoefficientSpec(g, 4)
        assert sigma_n(1 / 8, s) == pytest.approx(4 ** (-g) / 2)


def test_sup_error_value():
    assert sigma_n_sup_error(CoefficientSpec(0.5, 4)) == pytest.approx(0.125)
    assert sigma_n_sup_error(CoefficientSpec(0.5, 10**8)) < 1e-3


@pytest.mark.parametrize("n", [1, 2, 4, 8])
@pytest.mark.parametrize("g", [0.3, 0.5, 0.8])
def test_sup_error_grid(n, g):
    spec = CoefficientSpec(g, n)
    x = np.arange(0, 1000 * n + 1) / 1000.0
    err = np.abs(sigma_n(x, spec) - x**g).max()
    assert err <= sigma_n_sup_error(spec) + 1e-15


@pytest.mark.parametrize("n", [1, 4, 16])
def test_sigma_n_monotone_and_linear_growth(n):
    spec = CoefficientSpec(0.5, n)
    x = np.linspace(0, n, 100001)
    s = sigma_n(x, spec)
    assert np.all(np.diff(s) >= -1e-15)
    xs = np.linspace(0, 100, 10001)
    assert np.all(sigma_n(xs, spec) <= 2.0 * (1 + xs))


@pytest.mark.parametrize("g", [0.3, 0.5, 0.8])
def test_lipschitz_constant_finite_and_bounded(g):
    for n in (2, 8, 32):
        x = np.linspace(0, n + 3, 400001)
        s = sigma_n(x, CoefficientSpec(g, n))
        lip = np.max(np.abs(np.diff(s)) / np.diff(x))
        # linear branch slope n^(1-g); cutoff branch at most |psi'| x^g + g x^(g-1)
        bound = max(n ** (1 - g), 0.75 * (n + 2) ** g + g * n ** (g - 1))
        assert np.isfinite(lip)
        assert n ** (1 - g) * (1 - 1e-9) <= lip <= bound * (1 + 1e-6)


@given(st.floats(0, 30, allow_nan=False), st.integers(1, 10))
def test_sigma_n_nonnegative_and_even(x, n):
    spec = CoefficientSpec(0.5, n)
    assert sigma_n(x, spec) >= 0
    assert sigma_n(-x, spec) == sigma_n(x, spec)


def test_sigma_dispatch_and_spec_validation():
    assert sigma(4.0, CoefficientSpec(0.5)) == 2.0
    assert sigma(4.0, CoefficientSpec(0.5, 1)) == 0.0  # outside the cutoff support
    with pytest.raises(ValueError):
        CoefficientSpec(1.0)
    with pytest.raises(ValueError):
        CoefficientSpec(0.5, 0)
    with pytest.raises(ValueError):
        sigma_n(1.0, CoefficientSpec(0.5))
