"""Checks a run against the equilibrium: every disclosure versus a brute-force optimum,
plus the mechanism's desiderata (pay iff ownership changes hands, free self-transfers,
H only ever holding the owner's own addresses)."""
import logging
from decimal import Decimal
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from royalty_sim.agents.oracle import brute_force_best_x, grid_step
from royalty_sim.config import get_numerics_config
from royalty_sim.errors import ConfigurationError
from royalty_sim.ledger.events import EventKind, MechanismEvent
from royalty_sim.money import MINOR_UNIT, ZERO
from royalty_sim.sim import engine
from royalty_sim.sim.scenario import ScenarioConfig
from royalty_sim.sim.summary import SimulationSummary

logger = logging.getLogger(__name__)

OWNERSHIP_CHANGES = (EventKind.TRANSFER, EventKind.TAKE_BACK, EventKind.AUTO_BUY)


class DeviationRecord(BaseModel):
    seq: int
    player: str
    disclosed_x: float
    oracle_x: float
    grid_step: float
    oracle_utility: float


class DeviationReport(BaseModel):
    checked: int = Field(default=0, description="Disclosures compared against the oracle.")
    skipped: int = Field(default=0, description="Disclosures with m_P outside the price image.")
    deviations: List[DeviationRecord] = Field(default_factory=list)
    desiderata_violations: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.deviations and not self.desiderata_violations


class _Tenure(BaseModel):
    start_seq: Optional[int]
    cost: Decimal = ZERO
    changed_player: bool = False
    resolved: bool = False
    paid: bool = False
    ended_by: Optional[EventKind] = None


def _tenures(config: ScenarioConfig, events: Sequence[MechanismEvent]) -> List[_Tenure]:
    """Split the accepted events into ownership tenures, the minted one first."""
    directory = config.directory()
    tenures = [_Tenure(start_seq=None, resolved=True)]
    for event in events:
        if not event.accepted:
            continue
        current = tenures[-1]
        if event.kind in OWNERSHIP_CHANGES:
            current.ended_by = event.kind
            if event.kind == EventKind.TRANSFER:
                before, after, cost = event.actor, event.to, event.cost
            elif event.kind == EventKind.AUTO_BUY:
                before, after, cost = event.previous_owner, event.actor, event.payment
            else:
                before, after, cost = event.previous_owner, event.actor, ZERO
            tenures.append(
                _Tenure(
                    start_seq=event.seq,
                    cost=cost,
                    changed_player=directory.get(before) != directory.get(after),
                )
            )
        elif event.kind == EventKind.DISCLOSE:
            current.resolved = True
            current.paid = True
        elif event.kind in (EventKind.DECLINE, EventKind.TURN_EXPIRED):
            current.resolved = True
    return tenures


def check_desiderata(
    config: ScenarioConfig,
    events: Sequence[MechanismEvent],
    summary: Optional[SimulationSummary] = None,
) -> List[str]:
    """Human-readable descriptions of every desideratum the run breaks."""
    violations = []
    for tenure in _tenures(config, events)[1:]:
        if not tenure.resolved:
            continue
        if tenure.changed_player != tenure.paid:
            what = "paid" if tenure.paid else "did not pay"
            change = "a new player" if tenure.changed_player else "the same player"
            violations.append(
                f"pay-iff: tenure from seq {tenure.start_seq} {what} though it went to {change}"
            )
        if not tenure.changed_player and tenure.ended_by == EventKind.TAKE_BACK:
            violations.append(
                f"self-transfer: tenure from seq {tenure.start_seq} was taken back"
            )
    if summary is not None and summary.foreign_history_points:
        violations.append(
            f"H-ownership: H held another player's address at "
            f"{summary.foreign_history_points} quiescent point(s)"
        )
    return violations


def _oracle_grid(config: ScenarioConfig, x_truthful: float) -> Optional[Tuple[float, float]]:
    price = config.token.price
    lo, hi = price.domain
    grid_lo = max(x_truthful / 2, lo)
    grid_hi = min(x_truthful * 2, hi)
    if not 0 < grid_lo < x_truthful < grid_hi:
        return None
    return grid_lo, grid_hi


def verify_equilibrium(
    config: ScenarioConfig,
    grid_steps: Optional[int] = None,
    allow_mixed: bool = False,
    events: Optional[Sequence[MechanismEvent]] = None,
    summary: Optional[SimulationSummary] = None,
) -> DeviationReport:
    """Compare each accepted disclosure with the grid optimum of U_P.

    A disclosure deviates when it lies more than one grid step (plus a minor
    unit of rounding) from the oracle's argmax.
    """
    if not allow_mixed and not config.all_best_response():
        raise ConfigurationError(
            "equilibrium verification needs all players on best_response (or allow_mixed)"
        )
    steps = grid_steps if grid_steps is not None else get_numerics_config().grid_steps
    if events is None:
        events, summary = engine.run(config)

    fee, price = config.token.fee, config.token.price
    directory = config.directory()
    costs: Dict[int, Decimal] = {}
    tenure_cost = ZERO
    report = DeviationReport()
    for event in events:
        if not event.accepted:
            continue
        if event.kind == EventKind.TRANSFER:
            tenure_cost = event.cost
        elif event.kind == EventKind.AUTO_BUY:
            tenure_cost = event.payment
        elif event.kind == EventKind.TAKE_BACK:
            tenure_cost = ZERO
        elif event.kind == EventKind.DISCLOSE:
            costs[event.seq] = tenure_cost

    for event in events:
        if event.kind != EventKind.DISCLOSE or not event.accepted:
            continue
        player = config.player(directory[event.actor])
        m = float(player.fmv)
        y_lo, y_hi = price.image
        if not y_lo < m < y_hi:
            report.skipped += 1
            continue
        grid = _oracle_grid(config, price.invert(m))
        if grid is None:
            report.skipped += 1
            continue
        oracle_x, oracle_u = brute_force_best_x(
            player.fmv, player.hodl, fee, price, costs[event.seq], grid[0], grid[1], steps
        )
        step = grid_step(grid[0], grid[1], steps)
        report.checked += 1
        if abs(event.x - oracle_x) > step + float(MINOR_UNIT):
            logger.warning(
                f"{player.id} disclosed {event.x} at seq {event.seq}; oracle optimum {oracle_x}"
            )
            report.deviations.append(
                DeviationRecord(
                    seq=event.seq,
                    player=player.id,
                    disclosed_x=event.x,
                    oracle_x=oracle_x,
                    grid_step=step,
                    oracle_utility=oracle_u,
                )
            )

    report.desiderata_violations = check_desiderata(config, events, summary)
    logger.info(
        f"Checked {report.checked} disclosures: {len(report.deviations)} deviations, "
        f"{len(report.desiderata_violations)} desiderata violations"
    )
    return report
