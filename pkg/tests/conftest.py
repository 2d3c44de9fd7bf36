import numpy as np
import pytest

from cmest import asv


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def grid_argmin(ctx: asv.AsvContext, theta_range: float, n_points: int = 1_000_000):
    """Brute-force minimizer of the variance over (0, 2*pi/theta_range].

    Independent oracle for the closed-form phase optimizers: a dense linear
    scan with characteristic-function zeros masked out.
    """
    omega_max = 2.0 * np.pi / theta_range
    grid = np.linspace(omega_max / n_points, omega_max, n_points)
    values = asv.asv_on_grid(ctx, grid)
    best = int(np.argmin(values))
    return float(grid[best]), float(values[best])
