from decimal import Decimal
from typing import Optional, Union

from royalty_sim.agents.strategy import (
    ArbitrageBot,
    NeverDisclose,
    Overreport,
    SelfTransferer,
    StrategyKind,
    Underreport,
    best_response_disclosure,
    should_auto_buy,
    take_back_claimant,
)
from royalty_sim.errors import SpecRangeError
from royalty_sim.functions import FeeSpec, PriceSpec
from royalty_sim.ledger.state import Address, PlayerSpec, TokenState
from royalty_sim.money import MINOR_UNIT, to_money


def admissible_disclosure(fmv: Union[float, Decimal], price: PriceSpec) -> float:
    """The best-response x, or the nearest end of pi's domain when m_P is outside its image."""
    try:
        return best_response_disclosure(fmv, price)
    except SpecRangeError:
        lo, hi = price.domain
        if float(fmv) > price.image[1]:
            return hi
        return max(lo, float(MINOR_UNIT))


class PlayerAgent:
    """Agent that plays one player's strategy against the mechanism."""

    def __init__(self, spec: PlayerSpec, strategy: StrategyKind, fee: FeeSpec, price: PriceSpec):
        self.spec = spec
        self.strategy = strategy
        self.fee = fee
        self.price = price
        self._hops_left = strategy.hops if isinstance(strategy, SelfTransferer) else 0

    @property
    def name(self) -> str:
        return self.spec.id

    def owns(self, state: TokenState) -> bool:
        return self.spec.controls(state.owner)

    def needs_protection(self, state: TokenState) -> bool:
        """True when some other player could take the token back."""
        return any(not self.spec.controls(address) for address in state.history_set)

    def truthful_disclosure(self) -> float:
        return admissible_disclosure(self.spec.fmv, self.price)

    def intended_disclosure(self) -> float:
        x = self.truthful_disclosure()
        if isinstance(self.strategy, (Underreport, Overreport)):
            lo, hi = self.price.domain
            x = min(max(float(to_money(x * self.strategy.factor)), lo, float(MINOR_UNIT)), hi)
        return x

    def first_move(self, state: TokenState) -> Optional[float]:
        """The x to disclose, or ``None`` to decline."""
        if isinstance(self.strategy, NeverDisclose):
            return None
        if not self.needs_protection(state):
            return None
        return self.intended_disclosure()

    def self_transfer_target(self, state: TokenState) -> Optional[Address]:
        if self._hops_left <= 0 or not self.owns(state) or state.turn_open:
            return None
        addresses = self.spec.sorted_addresses()
        if len(addresses) < 2:
            return None
        return addresses[(addresses.index(state.owner) + 1) % len(addresses)]

    def record_self_transfer(self) -> None:
        self._hops_left -= 1

    def take_back_claim(self, state: TokenState) -> Optional[Address]:
        return take_back_claimant(self.spec, state)

    def auto_buy_claim(self, state: TokenState, now: int, balance) -> Optional[Address]:
        """The address to buy the active listing with, if this player wants it."""
        if not state.listing_active(now) or self.owns(state):
            return None
        listed = state.listing.price
        if balance < listed:
            return None
        if isinstance(self.strategy, ArbitrageBot):
            wanted = listed < self.strategy.floor
        else:
            wanted = should_auto_buy(self.spec, listed)
        return self.spec.sorted_addresses()[0] if wanted else None
