"""Re-applies a recorded event log through a fresh ledger and checks it matches."""
import logging
from typing import Optional, Sequence, Tuple

from royalty_sim.errors import EventOrderError, ReplayMismatchError
from royalty_sim.ledger.events import EventKind, MechanismEvent
from royalty_sim.ledger.ledger import Ledger
from royalty_sim.ledger.state import TokenState
from royalty_sim.sim.scenario import ScenarioConfig
from royalty_sim.sim.summary import SimulationSummary, build_summary, has_foreign_history

logger = logging.getLogger(__name__)


def _reapply(ledger: Ledger, event: MechanismEvent) -> Optional[MechanismEvent]:
    now = event.time
    if event.kind == EventKind.TRANSFER:
        return ledger.transfer(now, event.actor, event.to, event.cost)
    if event.kind == EventKind.DISCLOSE:
        return ledger.disclose(now, event.x)
    if event.kind == EventKind.DECLINE:
        return ledger.decline(now)
    if event.kind == EventKind.TURN_EXPIRED:
        return ledger.expire_turn(now)
    if event.kind == EventKind.TAKE_BACK:
        return ledger.take_back(now, event.actor)
    if event.kind == EventKind.AUTO_BUY:
        return ledger.auto_buy(now, event.actor, event.payment)
    return ledger.expire_listing(now)


def replay(
    events: Sequence[MechanismEvent], config: ScenarioConfig, seed: Optional[int] = None
) -> Tuple[TokenState, SimulationSummary]:
    """Rebuild the final state from ``events``.

    Rejected events are re-applied as well and must be rejected again with the
    same error. Raises ``ReplayMismatchError`` at the first event whose
    re-application differs from the record.
    """
    params = config.params()
    ledger = Ledger.open(
        params,
        owner=config.token.initial_owner,
        balances={player.id: player.balance for player in config.players},
    )
    foreign_history_points = 0
    for index, recorded in enumerate(events):
        if recorded.seq != index:
            raise ReplayMismatchError(recorded.seq, f"expected sequence number {index}")
        try:
            produced = _reapply(ledger, recorded)
        except EventOrderError as e:
            raise ReplayMismatchError(recorded.seq, str(e)) from e
        except (TypeError, ArithmeticError) as e:
            raise ReplayMismatchError(recorded.seq, f"event is missing fields: {e}") from e
        if produced is None:
            raise ReplayMismatchError(recorded.seq, f"{recorded.kind.value} had no effect")
        if produced.to_json() != recorded.to_json():
            raise ReplayMismatchError(
                recorded.seq, f"recorded {recorded.to_json()} but replay gave {produced.to_json()}"
            )
        if produced.accepted and has_foreign_history(ledger.state, params.directory):
            foreign_history_points += 1

    logger.info(f"Replayed {len(events)} events; final owner {ledger.state.owner}")
    summary = build_summary(
        config,
        ledger.state,
        ledger.events,
        seed=config.seed if seed is None else seed,
        foreign_history_points=foreign_history_points,
    )
    return ledger.state, summary
