"""Run summaries: totals, deviation flags and royalty shortfall, plus their JSON/CSV output."""
import logging
from collections import Counter
from decimal import Decimal
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import polars as pl
from pydantic import BaseModel, Field

from royalty_sim.agents.player_agent import admissible_disclosure
from royalty_sim.errors import SpecDomainError, SpecRangeError
from royalty_sim.functions import fee_eval
from royalty_sim.ledger.events import EventKind, MechanismEvent
from royalty_sim.ledger.state import Address, TokenState
from royalty_sim.money import MINOR_UNIT, ZERO
from royalty_sim.sim.scenario import ScenarioConfig

logger = logging.getLogger(__name__)


class DeviationFlag(BaseModel):
    seq: int
    player: str
    disclosed_x: float
    truthful_x: float


class SimulationSummary(BaseModel):
    """What a run ended with. Amounts are exact to the minor unit."""

    seed: int
    horizon: int
    final_owner: Address
    final_owner_player: str
    final_history_set: List[Address] = Field(default_factory=list)
    creator: str = "creator"
    royalties: Decimal = Field(default=ZERO, description="Total credited to the creator account.")
    escrow_outstanding: Decimal = ZERO
    balance_deltas: Dict[str, Decimal] = Field(default_factory=dict)
    event_counts: Dict[str, int] = Field(default_factory=dict)
    rejected_events: int = 0
    deviation_flags: List[DeviationFlag] = Field(default_factory=list)
    fee_shortfalls: int = Field(default=0, description="Settled fees below phi(pi^-1(c)).")
    max_fee_shortfall: Decimal = ZERO
    foreign_history_points: int = Field(
        default=0, description="Quiescent points where H held another player's address."
    )

    def conservation_holds(self) -> bool:
        """Balance changes, royalties and escrow still in the contract sum to zero."""
        moved = sum(self.balance_deltas.values(), ZERO)
        return moved + self.royalties + self.escrow_outstanding == 0

    def metric_rows(self) -> Dict[str, List[str]]:
        metrics = [
            ("seed", self.seed),
            ("horizon", self.horizon),
            ("final_owner", self.final_owner),
            ("final_owner_player", self.final_owner_player),
            (f"royalties.{self.creator}", self.royalties),
            ("escrow_outstanding", self.escrow_outstanding),
            ("rejected_events", self.rejected_events),
            ("deviation_flags", len(self.deviation_flags)),
            ("fee_shortfalls", self.fee_shortfalls),
            ("max_fee_shortfall", self.max_fee_shortfall),
            ("foreign_history_points", self.foreign_history_points),
        ]
        metrics += [(f"events.{kind}", count) for kind, count in sorted(self.event_counts.items())]
        metrics += [(f"delta.{player}", delta) for player, delta in self.balance_deltas.items()]
        return {
            "metric": [name for name, _ in metrics],
            "value": [str(value) for _, value in metrics],
        }

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame(self.metric_rows())


def has_foreign_history(state: TokenState, directory: Dict[Address, str]) -> bool:
    """True at a quiescent point (turn closed) where H names another player's address."""
    if state.turn_open:
        return False
    owner_player = directory.get(state.owner)
    return any(directory.get(address) != owner_player for address in state.history_set)


def _deviation_flags(
    config: ScenarioConfig, events: Sequence[MechanismEvent]
) -> List[DeviationFlag]:
    directory = config.directory()
    flags = []
    for event in events:
        if event.kind != EventKind.DISCLOSE or not event.accepted:
            continue
        player = config.player(directory[event.actor])
        truthful = admissible_disclosure(player.fmv, config.token.price)
        if abs(event.x - truthful) > float(MINOR_UNIT):
            flags.append(
                DeviationFlag(
                    seq=event.seq, player=player.id, disclosed_x=event.x, truthful_x=truthful
                )
            )
    return flags


def _ideal_fee(config: ScenarioConfig, cost: Decimal) -> Optional[Decimal]:
    try:
        return fee_eval(config.token.fee, config.token.price.invert(float(cost)))
    except (SpecDomainError, SpecRangeError):
        return None


def fee_shortfalls(config: ScenarioConfig, events: Sequence[MechanismEvent]) -> List[Decimal]:
    """phi(pi^-1(c)) minus the fee actually kept, for every settled priced tenure.

    A tenure's fee is settled by listing expiry or by an outgoing transfer;
    an auto-buy refunds it, so nothing is counted then.
    """
    shortfalls = []
    acquisition_cost: Optional[Decimal] = None
    pending = None

    def settle() -> None:
        if pending is None:
            return
        cost, fee = pending
        if cost is None or cost <= 0:
            return
        ideal = _ideal_fee(config, cost)
        if ideal is not None and ideal > fee:
            shortfalls.append(ideal - fee)

    for event in events:
        if not event.accepted:
            continue
        if event.kind == EventKind.TRANSFER:
            if event.royalty is not None:
                settle()
            pending = None
            acquisition_cost = event.cost
        elif event.kind == EventKind.TAKE_BACK:
            pending = None
            acquisition_cost = None
        elif event.kind == EventKind.AUTO_BUY:
            pending = None
            acquisition_cost = event.payment
        elif event.kind == EventKind.DISCLOSE:
            pending = (acquisition_cost, event.fee)
        elif event.kind == EventKind.AUTO_SALE_EXPIRED:
            settle()
            pending = None
    return shortfalls


def build_summary(
    config: ScenarioConfig,
    state: TokenState,
    events: Sequence[MechanismEvent],
    seed: int,
    foreign_history_points: int = 0,
) -> SimulationSummary:
    directory = config.directory()
    deltas = {}
    for player in sorted(config.players, key=lambda p: p.id):
        delta = state.balance_of(player.id) - player.balance
        if delta != 0:
            deltas[player.id] = delta
    counts = Counter(event.kind.value for event in events if event.accepted)
    shortfalls = fee_shortfalls(config, events)
    summary = SimulationSummary(
        seed=seed,
        horizon=config.horizon,
        final_owner=state.owner,
        final_owner_player=directory[state.owner],
        final_history_set=sorted(state.history_set),
        creator=config.token.creator,
        royalties=state.creator_account,
        escrow_outstanding=state.escrow,
        balance_deltas=deltas,
        event_counts=dict(sorted(counts.items())),
        rejected_events=sum(1 for event in events if not event.accepted),
        deviation_flags=_deviation_flags(config, events),
        fee_shortfalls=len(shortfalls),
        max_fee_shortfall=max(shortfalls, default=ZERO),
        foreign_history_points=foreign_history_points,
    )
    if not summary.conservation_holds():
        logger.error(f"Conservation failed for seed {seed}: {summary.balance_deltas}")
    return summary


def write_summary_json(summary: SimulationSummary, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(summary.model_dump_json(indent=2), encoding="utf-8")
    return path


def write_summary_csv(summary: SimulationSummary, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    summary.to_frame().write_csv(path)
    return path
