"""Grid-search oracle for the best disclosure, independent of the closed form."""
from typing import Tuple

import numpy as np

from royalty_sim.agents.utility import Real, aggregate_utility
from royalty_sim.errors import ConfigurationError
from royalty_sim.functions import FeeSpec, PriceSpec

MIN_GRID_STEPS = 1000


def brute_force_best_x(
    fmv: Real,
    hodl: Real,
    fee: FeeSpec,
    price: PriceSpec,
    cost: Real,
    grid_lo: float,
    grid_hi: float,
    steps: int,
) -> Tuple[float, float]:
    """Argmax of U_P over ``steps`` evenly spaced points in [grid_lo, grid_hi].

    The first maximum encountered wins ties.
    """
    if steps < MIN_GRID_STEPS:
        raise ConfigurationError(f"grid needs at least {MIN_GRID_STEPS} steps, got {steps}")
    if not 0 < grid_lo < grid_hi:
        raise ConfigurationError(f"invalid grid bounds [{grid_lo}, {grid_hi}]")
    m = float(fmv)
    if not price.evaluate(grid_lo) < m < price.evaluate(grid_hi):
        raise ConfigurationError(f"fmv {m} is not inside the price image of the grid")

    grid = np.linspace(grid_lo, grid_hi, steps)
    utilities = aggregate_utility(fmv, hodl, fee, price, grid, cost)
    best = int(np.argmax(utilities))
    return float(grid[best]), float(utilities[best])


def grid_step(grid_lo: float, grid_hi: float, steps: int) -> float:
    return (grid_hi - grid_lo) / (steps - 1)
