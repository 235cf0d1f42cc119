import logging
from decimal import Decimal
from typing import Callable, Dict, List, Optional

from royalty_sim.errors import (
    EventOrderError,
    InvalidAmountError,
    MechanismError,
    SpecDomainError,
    SpecRangeError,
)
from royalty_sim.ledger import rules
from royalty_sim.ledger.events import EventKind, MechanismEvent
from royalty_sim.ledger.history import OwnershipRecord
from royalty_sim.ledger.state import Address, MechanismParams, TokenState
from royalty_sim.money import ZERO, to_money

logger = logging.getLogger(__name__)

REJECTABLE = (MechanismError, SpecDomainError, SpecRangeError)


def _logged_amount(value) -> Optional[Decimal]:
    """The amount as it will be logged; unrepresentable values log as ``None``."""
    try:
        return to_money(value)
    except InvalidAmountError:
        return None


def _balance_deltas(before: Dict[str, Decimal], after: Dict[str, Decimal]) -> Dict[str, Decimal]:
    deltas = {}
    for player in sorted(set(before) | set(after)):
        delta = after.get(player, ZERO) - before.get(player, ZERO)
        if delta != 0:
            deltas[player] = delta
    return deltas


class Ledger:
    """Applies moves to one token and keeps the totally ordered event log.

    Rejected moves are logged with ``accepted=False`` and leave the state
    untouched; with ``strict=True`` the rejection is re-raised after logging.
    """

    def __init__(self, params: MechanismParams, state: TokenState, strict: bool = False):
        self.params = params
        self.state = state
        self.strict = strict
        self.events: List[MechanismEvent] = []
        self.ownership_history: List[OwnershipRecord] = [
            (state.owner, state.tenure_fee is not None)
        ]
        self._last_time: Optional[int] = None

    @classmethod
    def open(
        cls,
        params: MechanismParams,
        owner: Address,
        balances: Dict[str, Decimal],
        strict: bool = False,
    ) -> "Ledger":
        """A freshly minted token: the creator's first owner is settled and H is empty."""
        state = TokenState(
            owner=owner, balances={player: to_money(amount) for player, amount in balances.items()}
        )
        return cls(params, state, strict=strict)

    @property
    def next_seq(self) -> int:
        return len(self.events)

    def _record(
        self,
        kind: EventKind,
        now: int,
        transition: Callable[[], Optional[TokenState]],
        **fields,
    ) -> Optional[MechanismEvent]:
        if self._last_time is not None and now < self._last_time:
            raise EventOrderError(f"event at tick {now} precedes tick {self._last_time}")
        before = self.state
        try:
            after = transition()
        except REJECTABLE as e:
            event = MechanismEvent(
                seq=self.next_seq, time=now, kind=kind, accepted=False, error=str(e), **fields
            )
            logger.warning(f"Rejected {kind.value} at tick {now}: {e}")
            self._append(event, now)
            if self.strict:
                raise
            return event
        if after is None:
            return None

        royalty = after.creator_account - before.creator_account
        event = MechanismEvent(
            seq=self.next_seq,
            time=now,
            kind=kind,
            royalty=royalty if royalty != 0 else None,
            balances_delta=_balance_deltas(before.balances, after.balances),
            **fields,
        )
        self.state = after
        self._track_ownership(kind)
        self._append(event, now)
        logger.debug(f"Applied {kind.value} at tick {now}: owner={after.owner}")
        return event

    def _append(self, event: MechanismEvent, now: int) -> None:
        self.events.append(event)
        self._last_time = now

    def _track_ownership(self, kind: EventKind) -> None:
        if kind in (EventKind.TRANSFER, EventKind.TAKE_BACK, EventKind.AUTO_BUY):
            self.ownership_history.append((self.state.owner, False))
        elif kind == EventKind.DISCLOSE:
            self.ownership_history[-1] = (self.state.owner, True)

    def transfer(
        self, now: int, from_address: Address, to_address: Address, cost
    ) -> MechanismEvent:
        return self._record(
            EventKind.TRANSFER,
            now,
            lambda: rules.apply_transfer(
                self.state, self.params, from_address, to_address, cost, now
            ),
            actor=from_address,
            to=to_address,
            cost=_logged_amount(cost),
        )

    def disclose(self, now: int, x: float) -> MechanismEvent:
        owner = self.state.owner

        def transition() -> TokenState:
            return rules.apply_disclose(self.state, self.params, x, now)

        event = self._record(EventKind.DISCLOSE, now, transition, actor=owner, x=float(x))
        if event.accepted:
            # enrich with the amounts the rules computed
            listing = self.state.listing
            event = event.model_copy(
                update={
                    "fee": self.state.tenure_fee.fee,
                    "price": listing.price,
                    "expires_at": listing.expires_at,
                }
            )
            self.events[-1] = event
        return event

    def decline(self, now: int) -> MechanismEvent:
        return self._record(
            EventKind.DECLINE,
            now,
            lambda: rules.apply_decline(self.state, now),
            actor=self.state.owner,
        )

    def expire_turn(self, now: int) -> MechanismEvent:
        return self._record(
            EventKind.TURN_EXPIRED,
            now,
            lambda: rules.apply_turn_expiry(self.state, now),
            actor=self.state.owner,
        )

    def take_back(self, now: int, claimant: Address) -> MechanismEvent:
        return self._record(
            EventKind.TAKE_BACK,
            now,
            lambda: rules.apply_take_back(self.state, self.params, claimant, now),
            actor=claimant,
            previous_owner=self.state.owner,
        )

    def auto_buy(self, now: int, buyer: Address, payment) -> MechanismEvent:
        refund = self.state.escrow if self.state.listing_active(now) else None
        return self._record(
            EventKind.AUTO_BUY,
            now,
            lambda: rules.apply_auto_buy(self.state, self.params, buyer, payment, now),
            actor=buyer,
            previous_owner=self.state.owner,
            payment=_logged_amount(payment),
            refund=refund,
        )

    def expire_listing(self, now: int) -> Optional[MechanismEvent]:
        """Settle a lapsed listing; ``None`` if nothing was due."""
        return self._record(
            EventKind.AUTO_SALE_EXPIRED, now, lambda: rules.apply_expiry(self.state, now)
        )
