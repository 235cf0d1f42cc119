"""Token-specific fee (phi) and auto-sale price (pi) functions."""
import logging
from decimal import Decimal
from typing import Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import bisect

from royalty_sim.errors import SpecDomainError, SpecRangeError
from royalty_sim.money import MINOR_UNIT, to_money

logger = logging.getLogger(__name__)

INVERSION_TOLERANCE = 1e-9
BISECT_MAXITER = 200

ArrayLike = Union[float, np.ndarray]
SamplePoints = Tuple[Tuple[float, float], ...]


def _check_table(table: SamplePoints, label: str) -> Tuple[np.ndarray, np.ndarray]:
    if len(table) < 2:
        raise ValueError(f"{label} table needs at least two sample points")
    xs = np.array([point[0] for point in table], dtype=float)
    ys = np.array([point[1] for point in table], dtype=float)
    if xs[0] <= 0:
        raise ValueError(f"{label} table must start at a positive x")
    if np.any(np.diff(xs) <= 0):
        raise ValueError(f"{label} table x values must be strictly increasing")
    if ys[0] <= 0:
        raise ValueError(f"{label} table values must be strictly positive")
    if np.any(np.diff(ys) <= 0):
        raise ValueError(f"{label} table values must be strictly increasing")
    return xs, ys


def _check_domain(x: ArrayLike, lo: Optional[float] = None, hi: Optional[float] = None):
    values = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise SpecDomainError(f"argument must be a positive finite real, got {x!r}")
    if lo is not None and (np.any(values < lo) or np.any(values > hi)):
        raise SpecRangeError(f"argument {x!r} outside table range [{lo}, {hi}]")


def _as_output(values: np.ndarray, x: ArrayLike) -> ArrayLike:
    return float(values) if np.ndim(x) == 0 else values


class FeeSpec(BaseModel):
    """The fee function phi with its declared Lipschitz constant.

    ``linear`` is phi(x) = rho * x; ``monotone-table`` interpolates linearly
    between strictly increasing ``(x, fee)`` samples.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["linear", "monotone-table"]
    rho: Optional[float] = Field(default=None, gt=0, lt=1)
    table: Optional[SamplePoints] = None
    declared_lipschitz: Optional[float] = Field(default=None, gt=0, lt=1)

    @model_validator(mode="after")
    def _validate_shape(self) -> "FeeSpec":
        if self.kind == "linear":
            if self.rho is None:
                raise ValueError("linear fee requires rho")
            if self.declared_lipschitz is not None and self.declared_lipschitz < self.rho:
                raise ValueError("declared_lipschitz must be at least rho for a linear fee")
        else:
            if self.table is None:
                raise ValueError("monotone-table fee requires table")
            xs, ys = _check_table(self.table, "fee")
            steepest = float(np.max(np.diff(ys) / np.diff(xs)))
            if steepest >= 1:
                raise ValueError(f"fee table slope {steepest} is not below 1")
            if self.declared_lipschitz is not None and steepest > self.declared_lipschitz:
                raise ValueError(
                    f"fee table slope {steepest} exceeds declared_lipschitz "
                    f"{self.declared_lipschitz}"
                )
        return self

    @classmethod
    def linear(cls, rho: float) -> "FeeSpec":
        return cls(kind="linear", rho=rho)

    @property
    def lipschitz(self) -> float:
        """Declared Lipschitz constant L_phi (defaults to the steepest slope)."""
        if self.declared_lipschitz is not None:
            return self.declared_lipschitz
        if self.kind == "linear":
            return self.rho
        xs, ys = self._samples()
        return float(np.max(np.diff(ys) / np.diff(xs)))

    @property
    def domain(self) -> Tuple[float, float]:
        if self.kind == "linear":
            return 0.0, float("inf")
        xs, _ = self._samples()
        return float(xs[0]), float(xs[-1])

    def _samples(self) -> Tuple[np.ndarray, np.ndarray]:
        return _check_table(self.table, "fee")

    def evaluate(self, x: ArrayLike) -> ArrayLike:
        """phi(x) as a float (or array), for utility and oracle computations."""
        if self.kind == "linear":
            _check_domain(x)
            return _as_output(self.rho * np.asarray(x, dtype=float), x)
        xs, ys = self._samples()
        _check_domain(x, xs[0], xs[-1])
        return _as_output(np.interp(x, xs, ys), x)


class PriceSpec(BaseModel):
    """The auto-sale price function pi and its inverse."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["identity", "linear", "monotone-table"]
    scale: Optional[float] = Field(default=None, gt=0)
    table: Optional[SamplePoints] = None

    @model_validator(mode="after")
    def _validate_shape(self) -> "PriceSpec":
        if self.kind == "linear" and self.scale is None:
            raise ValueError("linear price requires scale")
        if self.kind == "monotone-table":
            if self.table is None:
                raise ValueError("monotone-table price requires table")
            _check_table(self.table, "price")
        return self

    @classmethod
    def identity(cls) -> "PriceSpec":
        return cls(kind="identity")

    def _samples(self) -> Tuple[np.ndarray, np.ndarray]:
        return _check_table(self.table, "price")

    @property
    def domain(self) -> Tuple[float, float]:
        if self.kind != "monotone-table":
            return 0.0, float("inf")
        xs, _ = self._samples()
        return float(xs[0]), float(xs[-1])

    @property
    def image(self) -> Tuple[float, float]:
        if self.kind != "monotone-table":
            return 0.0, float("inf")
        _, ys = self._samples()
        return float(ys[0]), float(ys[-1])

    @property
    def lipschitz(self) -> float:
        if self.kind == "identity":
            return 1.0
        if self.kind == "linear":
            return self.scale
        xs, ys = self._samples()
        return float(np.max(np.diff(ys) / np.diff(xs)))

    def evaluate(self, x: ArrayLike) -> ArrayLike:
        if self.kind == "identity":
            _check_domain(x)
            return _as_output(np.asarray(x, dtype=float), x)
        if self.kind == "linear":
            _check_domain(x)
            return _as_output(self.scale * np.asarray(x, dtype=float), x)
        xs, ys = self._samples()
        _check_domain(x, xs[0], xs[-1])
        return _as_output(np.interp(x, xs, ys), x)

    def invert(self, m: float) -> float:
        """pi^-1(m); exact for identity and linear, bisection for tables."""
        _check_domain(m)
        if self.kind == "identity":
            return float(m)
        if self.kind == "linear":
            return float(m) / self.scale
        lo, hi = self.domain
        y_lo, y_hi = self.image
        if m < y_lo or m > y_hi:
            raise SpecRangeError(f"{m} outside price image [{y_lo}, {y_hi}]")
        if m == y_lo:
            return lo
        if m == y_hi:
            return hi
        x = bisect(
            lambda t: self.evaluate(t) - m, lo, hi, xtol=1e-13, maxiter=BISECT_MAXITER
        )
        residual = abs(self.evaluate(x) - m)
        if residual > INVERSION_TOLERANCE:
            logger.warning(f"price inversion residual {residual:.3e} above tolerance for m={m}")
        return float(x)


def fee_eval(spec: FeeSpec, x: float) -> Decimal:
    """phi(x) rounded to minor units; never below one minor unit."""
    return max(to_money(spec.evaluate(x)), MINOR_UNIT)


def price_eval(spec: PriceSpec, x: float) -> Decimal:
    """pi(x) rounded to minor units; never below one minor unit."""
    return max(to_money(spec.evaluate(x)), MINOR_UNIT)


def price_invert(spec: PriceSpec, m: float) -> float:
    return spec.invert(float(m))


def lipschitz_estimate(spec: FeeSpec, grid: Sequence[float]) -> float:
    """Largest slope of phi between adjacent grid points."""
    points = np.asarray(grid, dtype=float)
    if points.ndim != 1 or points.size < 2:
        raise SpecDomainError("grid needs at least two points")
    gaps = np.diff(points)
    if np.any(gaps == 0):
        raise SpecDomainError("grid contains duplicate points")
    if np.any(gaps < 0):
        raise SpecDomainError("grid must be strictly increasing")
    values = spec.evaluate(points)
    if spec.kind == "linear":
        return spec.rho
    return float(np.max(np.abs(np.diff(values)) / gaps))
