"""Simulation and verification lab for du = 1/2 u_xx + u^gamma xi with u(0) = 1."""

__version__ = "0.1.0"

from .analytic import (cov_bound, cov_exact_half, dual_ode_w, heat_kernel, lower_tail_rate,  # noqa: E402
                       mgf_rate)
from .coefficients import CoefficientSpec, psi, sigma, sigma_exact, sigma_n, sigma_n_sup_error  # noqa: E402
from .dual import DualConfig, DualSolution, duality_log_mgf, solve_dual, supersolution_hbar  # noqa: E402
from .lattice import (FieldState, GridSpec, SeedScheme, derive_stream, make_grid,  # noqa: E402
                      sample_noise_layer)
from .solver import SimConfig, Trajectory, block_sums, simulate, spatial_integral, step  # noqa: E402
