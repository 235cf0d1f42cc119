"""Player utility of a disclosure x, given a purchase at cost c.

All functions accept a scalar ``x`` or a numpy array of candidates and
return floats (or arrays) in currency units.
"""
from decimal import Decimal
from typing import Union

import numpy as np

from royalty_sim.functions import ArrayLike, FeeSpec, PriceSpec

Real = Union[float, Decimal, int]


def utility_resell(price: PriceSpec, x: ArrayLike, cost: Real) -> ArrayLike:
    """pi(x) - c: the token is bought out in the auto-sale window."""
    return price.evaluate(x) - float(cost)


def utility_keep(hodl: Real, fee: FeeSpec, x: ArrayLike, cost: Real) -> ArrayLike:
    """v_P - phi(x) - c: the token is kept and the fee is forfeited."""
    return float(hodl) - fee.evaluate(x) - float(cost)


def aggregate_utility(
    fmv: Real, hodl: Real, fee: FeeSpec, price: PriceSpec, x: ArrayLike, cost: Real
) -> ArrayLike:
    """U_P(x): resale below the market estimate, keep above it.

    At pi(x) == m_P both outcomes are possible and the better one is taken.
    """
    listed = price.evaluate(x)
    resell = listed - float(cost)
    keep = utility_keep(hodl, fee, x, cost)
    m = float(fmv)
    values = np.where(listed < m, resell, np.where(listed > m, keep, np.maximum(resell, keep)))
    return float(values) if np.ndim(x) == 0 else values


def supremum_utility(fmv: Real, hodl: Real, fee: FeeSpec, price: PriceSpec, cost: Real) -> float:
    """max(m_P, v_P - phi(pi^-1(m_P))) - c, attained by truthful disclosure."""
    x_truthful = price.invert(float(fmv))
    return max(float(fmv), float(hodl) - fee.evaluate(x_truthful)) - float(cost)
