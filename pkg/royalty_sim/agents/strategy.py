"""Strategy kinds and the best-response decision rules."""
from decimal import ROUND_HALF_UP, Decimal
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from royalty_sim.errors import SpecRangeError
from royalty_sim.functions import PriceSpec, price_invert
from royalty_sim.ledger.state import Address, PlayerSpec, TokenState
from royalty_sim.money import MINOR_UNIT, to_money


class _Strategy(BaseModel):
    model_config = ConfigDict(frozen=True)


class BestResponse(_Strategy):
    kind: Literal["best_response"] = "best_response"


class Underreport(_Strategy):
    kind: Literal["underreport"] = "underreport"
    factor: float = Field(gt=0, lt=1)


class Overreport(_Strategy):
    kind: Literal["overreport"] = "overreport"
    factor: float = Field(gt=1)


class NeverDisclose(_Strategy):
    kind: Literal["never_disclose"] = "never_disclose"


class SelfTransferer(_Strategy):
    """Moves the token across its own addresses ``hops`` times."""

    kind: Literal["self_transferer"] = "self_transferer"
    hops: int = Field(default=1, ge=0)


class ArbitrageBot(_Strategy):
    """Buys back any listing priced strictly below ``floor``."""

    kind: Literal["arbitrage_bot"] = "arbitrage_bot"
    floor: Decimal = Field(ge=0)


StrategyKind = Annotated[
    Union[BestResponse, Underreport, Overreport, NeverDisclose, SelfTransferer, ArbitrageBot],
    Field(discriminator="kind"),
]


def best_response_disclosure(
    fmv: Union[float, Decimal], price: PriceSpec, epsilon: Optional[float] = None
) -> float:
    """pi^-1(m_P) rounded to the nearest multiple of ``epsilon`` (one minor unit by default).

    Raises ``SpecRangeError`` when m_P lies outside the image of pi.
    """
    step = Decimal(str(epsilon)) if epsilon is not None else MINOR_UNIT
    lo, hi = price.domain
    y_lo, y_hi = price.image
    m = float(fmv)
    if m <= 0 or not y_lo <= m <= y_hi:
        raise SpecRangeError(f"market value {m} outside price image [{y_lo}, {y_hi}]")
    x = Decimal(repr(price_invert(price, m)))
    rounded = (x / step).quantize(Decimal(1), rounding=ROUND_HALF_UP) * step
    return min(max(float(rounded), lo, float(step)), hi)


def should_take_back(player: PlayerSpec, state: TokenState) -> bool:
    """Rule 2 is a free lunch: reclaim whenever entitled and not already the owner."""
    if state.tenure_fee is not None or player.controls(state.owner):
        return False
    return any(player.controls(address) for address in state.history_set)


def take_back_claimant(player: PlayerSpec, state: TokenState) -> Optional[Address]:
    if not should_take_back(player, state):
        return None
    return min(address for address in state.history_set if player.controls(address))


def should_auto_buy(player: PlayerSpec, listing_price: Union[Decimal, float]) -> bool:
    """Buy strictly below the player's market estimate; ties decline."""
    return to_money(listing_price) < player.fmv
