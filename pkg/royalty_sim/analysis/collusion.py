"""Feasibility of bribing historical owners not to exercise their take-back right.

A collusion contract pays each of N colluders a bribe beta_i up front, while
they lock collateral kappa_i for a period T that earns the rate R elsewhere.
"""
import logging
import math
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from royalty_sim.errors import SpecDomainError

logger = logging.getLogger(__name__)

TOTAL_BRIBE = "total bribe"
LOWER_BRIBE = "lower bribe"
LOWER_COLLATERAL = "lower collateral"


class CollusionContract(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_colluders: int = Field(gt=0)
    bribes: Tuple[float, ...]
    collaterals: Tuple[float, ...]
    lockup: float = Field(gt=0, description="T in years.")
    rate: float = Field(gt=0, description="R, continuously compounded per year.")
    hodl: float = Field(ge=0)
    fee_at_xp: float = Field(ge=0)

    @model_validator(mode="after")
    def _check_lengths(self) -> "CollusionContract":
        if len(self.bribes) != self.n_colluders or len(self.collaterals) != self.n_colluders:
            raise ValueError("bribes and collaterals need one entry per colluder")
        if min(self.bribes) < 0 or min(self.collaterals) < 0:
            raise ValueError("bribes and collaterals must be non-negative")
        return self

    @classmethod
    def symmetric(
        cls,
        n: int,
        bribe: float,
        collateral: float,
        lockup: float,
        rate: float,
        hodl: float,
        fee_at_xp: float,
    ) -> "CollusionContract":
        return cls(
            n_colluders=n,
            bribes=(bribe,) * n,
            collaterals=(collateral,) * n,
            lockup=lockup,
            rate=rate,
            hodl=hodl,
            fee_at_xp=fee_at_xp,
        )

    @property
    def discount(self) -> float:
        return lockup_discount(self.rate, self.lockup)


class CollusionLimit(BaseModel):
    """Bounds on the collusion horizon T*N, approximate and exact."""

    approx_tn_bound: float
    discount: Optional[float] = None
    exact_ratio: Optional[float] = None
    necessary_condition_holds: Optional[bool] = None
    symmetric_feasible: Optional[bool] = None


def lockup_discount(rate: float, lockup: float) -> float:
    """lambda = 1 - exp(-R T), the opportunity cost of locked collateral."""
    if rate <= 0 or lockup <= 0:
        raise SpecDomainError("rate and lockup must be positive")
    return -math.expm1(-rate * lockup)


def collusion_feasible(contract: CollusionContract) -> Tuple[bool, List[str]]:
    """Check the three strict feasibility inequalities; name each violated one."""
    lam = contract.discount
    total_bribe = sum(contract.bribes)
    violated = []
    if not contract.fee_at_xp > total_bribe:
        violated.append(TOTAL_BRIBE)
    if not all(beta > lam * kappa for beta, kappa in zip(contract.bribes, contract.collaterals)):
        violated.append(LOWER_BRIBE)
    if not all(kappa > contract.hodl + total_bribe for kappa in contract.collaterals):
        violated.append(LOWER_COLLATERAL)
    return not violated, violated


def _symmetric_threshold(lam: float, n: int, hodl: float) -> Optional[float]:
    """Smallest per-colluder bribe compatible with both collateral constraints."""
    if lam * n >= 1:
        return None
    return lam * hodl / (1 - lam * n)


def collusion_limit(
    fee_at_xp: float,
    hodl: float,
    rate: float,
    lockup: Optional[float] = None,
    n: Optional[int] = None,
) -> CollusionLimit:
    """T*N < phi(x_P) / (R v_P), valid for R T << 1.

    With ``lockup`` and ``n`` also reports lambda, the exact necessary ratio
    phi(x_P) / (lambda N v_P) (collusion needs it above 1) and whether a
    symmetric contract exists.
    """
    if fee_at_xp <= 0 or hodl <= 0 or rate <= 0:
        raise SpecDomainError("fee, hodl value and rate must be positive")
    limit = CollusionLimit(approx_tn_bound=fee_at_xp / (rate * hodl))
    if lockup is None or n is None:
        return limit
    if n <= 0:
        raise SpecDomainError("number of colluders must be positive")
    lam = lockup_discount(rate, lockup)
    ratio = fee_at_xp / (lam * n * hodl)
    witness = find_feasible_collusion(fee_at_xp, hodl, rate, lockup, n)
    return limit.model_copy(
        update={
            "discount": lam,
            "exact_ratio": ratio,
            "necessary_condition_holds": ratio > 1,
            "symmetric_feasible": witness is not None,
        }
    )


def collusion_limit_linear(rho: float, rate: float) -> float:
    """rho / R: with a linear fee and identity price the bound no longer depends on value."""
    if rho <= 0 or rate <= 0:
        raise SpecDomainError("rho and rate must be positive")
    return rho / rate


def find_feasible_collusion(
    fee_at_xp: float, hodl: float, rate: float, lockup: float, n: int
) -> Optional[Tuple[float, float]]:
    """A symmetric (bribe, collateral) pair satisfying all three inequalities, if any.

    Symmetric contracts exist iff lambda N < 1 and
    N lambda v_P / (1 - lambda N) < phi(x_P).
    """
    lam = lockup_discount(rate, lockup)
    beta_min = _symmetric_threshold(lam, n, hodl)
    beta_max = fee_at_xp / n
    if beta_min is None or not beta_min < beta_max:
        return None
    bribe = (beta_min + beta_max) / 2
    kappa_lo = hodl + n * bribe
    kappa_hi = bribe / lam
    collateral = (kappa_lo + kappa_hi) / 2
    contract = CollusionContract.symmetric(n, bribe, collateral, lockup, rate, hodl, fee_at_xp)
    feasible, violated = collusion_feasible(contract)
    if not feasible:
        # only reachable at floating-point boundaries
        logger.debug(f"symmetric witness rejected by {violated} for N={n}, T={lockup}")
        return None
    return bribe, collateral

