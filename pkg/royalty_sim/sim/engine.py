"""Discrete-time driver: runs agents and scripted moves against one ledger."""
import logging
from collections import defaultdict
from enum import Enum
from typing import Dict, List, Optional, Tuple

from royalty_sim.agents.player_agent import PlayerAgent
from royalty_sim.ledger.events import MechanismEvent
from royalty_sim.ledger.ledger import Ledger
from royalty_sim.ledger.state import Address
from royalty_sim.sim.scenario import ScenarioConfig, ScriptedIntent
from royalty_sim.sim.summary import SimulationSummary, build_summary, has_foreign_history

logger = logging.getLogger(__name__)


class SimPhase(Enum):
    """Order in which moves are attempted inside one tick."""
    SCRIPT = "script"
    TURN_EXPIRY = "turn_expiry"
    FIRST_MOVE = "first_move"
    TAKE_BACK = "take_back"
    AUTO_BUY = "auto_buy"
    LISTING_EXPIRY = "listing_expiry"


class SimulationEngine:
    """Manages one simulated token from mint to horizon.

    Each tick runs the phases of ``SimPhase`` in order. Ties inside a phase
    are broken by address or player id so a run is fully deterministic.
    """

    def __init__(self, config: ScenarioConfig, seed: Optional[int] = None):
        self.config = config
        self.seed = config.seed if seed is None else seed
        self.params = config.params()
        self.ledger = Ledger.open(
            self.params,
            owner=config.token.initial_owner,
            balances={player.id: player.balance for player in config.players},
        )
        self.agents: Dict[str, PlayerAgent] = {
            player.id: PlayerAgent(
                player.to_spec(), player.strategy, config.token.fee, config.token.price
            )
            for player in sorted(config.players, key=lambda p: p.id)
        }
        # Scripted intents keyed by tick, in file order
        self.script: Dict[int, List[ScriptedIntent]] = defaultdict(list)
        for intent in config.script:
            self.script[intent.time].append(intent)
        self.phase = SimPhase.SCRIPT
        self.foreign_history_points = 0

    @property
    def state(self):
        return self.ledger.state

    @property
    def events(self) -> List[MechanismEvent]:
        return self.ledger.events

    def agent_for(self, address: Address) -> Optional[PlayerAgent]:
        player_id = self.params.player_of(address)
        return self.agents.get(player_id) if player_id is not None else None

    def _observe(self, event: Optional[MechanismEvent]) -> Optional[MechanismEvent]:
        if event is not None and event.accepted:
            if has_foreign_history(self.state, self.params.directory):
                self.foreign_history_points += 1
        return event

    def _apply_intent(self, intent: ScriptedIntent, now: int) -> Optional[MechanismEvent]:
        logger.debug(f"Scripted {intent.kind} at tick {now}")
        if intent.kind == "transfer":
            source = intent.from_address or self.state.owner
            return self.ledger.transfer(now, source, intent.to, intent.cost)
        if intent.kind == "disclose":
            return self.ledger.disclose(now, intent.x)
        if intent.kind == "decline":
            return self.ledger.decline(now)
        if intent.kind == "take_back":
            return self.ledger.take_back(now, intent.claimant)
        if intent.kind == "auto_buy":
            payment = intent.payment
            if payment is None:
                listing = self.state.listing
                payment = listing.price if listing is not None else 0
            return self.ledger.auto_buy(now, intent.buyer, payment)
        return None

    def _first_move(self, now: int) -> None:
        agent = self.agent_for(self.state.owner)
        if agent is None:
            return
        # Open turn: disclose or decline
        if self.state.turn_open:
            x = agent.first_move(self.state)
            if x is None:
                self._observe(self.ledger.decline(now))
            else:
                logger.info(f"{agent.name} discloses x={x} at tick {now}")
                self._observe(self.ledger.disclose(now, x))
            return

        # Closed turn: optional hop to a sibling address
        target = agent.self_transfer_target(self.state)
        if target is not None:
            event = self._observe(self.ledger.transfer(now, self.state.owner, target, 0))
            if event is not None and event.accepted:
                agent.record_self_transfer()

    def _take_back_polls(self, now: int) -> None:
        if self.state.turn_open:
            return
        for address in sorted(self.state.history_set):
            agent = self.agent_for(address)
            if agent is None:
                continue
            claimant = agent.take_back_claim(self.state)
            if claimant is None:
                continue
            # First accepted claim wins the tick
            event = self._observe(self.ledger.take_back(now, claimant))
            if event is not None and event.accepted:
                logger.info(f"{agent.name} took the token back via {claimant} at tick {now}")
                return

    def _auto_buy_polls(self, now: int) -> None:
        if not self.state.listing_active(now):
            return
        for player_id, agent in self.agents.items():
            buyer = agent.auto_buy_claim(self.state, now, self.state.balance_of(player_id))
            if buyer is None:
                continue
            event = self._observe(self.ledger.auto_buy(now, buyer, self.state.listing.price))
            if event is not None and event.accepted:
                logger.info(f"{player_id} auto-bought at {event.payment} at tick {now}")
                return

    def step(self, now: int) -> None:
        """Run every phase of tick ``now``."""
        self.phase = SimPhase.SCRIPT
        suppress_owner = False
        # Scripted moves; wait only silences the owner
        for intent in self.script.get(now, []):
            if intent.kind == "wait":
                suppress_owner = True
                continue
            self._observe(self._apply_intent(intent, now))

        self.phase = SimPhase.TURN_EXPIRY
        deadline = self.state.first_move_deadline
        if deadline is not None and now > deadline:
            self._observe(self.ledger.expire_turn(now))

        self.phase = SimPhase.FIRST_MOVE
        if not suppress_owner:
            self._first_move(now)

        self.phase = SimPhase.TAKE_BACK
        self._take_back_polls(now)

        self.phase = SimPhase.AUTO_BUY
        self._auto_buy_polls(now)

        # Settle the fee once the window has closed
        self.phase = SimPhase.LISTING_EXPIRY
        self._observe(self.ledger.expire_listing(now))

    def run(self) -> Tuple[List[MechanismEvent], SimulationSummary]:
        logger.info(
            f"Running {len(self.agents)} players to horizon {self.config.horizon} "
            f"(seed {self.seed})"
        )
        # Horizon tick included
        for now in range(self.config.horizon + 1):
            self.step(now)
        summary = build_summary(
            self.config,
            self.state,
            self.events,
            seed=self.seed,
            foreign_history_points=self.foreign_history_points,
        )
        logger.info(
            f"Finished with {len(self.events)} events; owner {summary.final_owner}, "
            f"royalties {summary.royalties}"
        )
        return list(self.events), summary


def run(
    config: ScenarioConfig, seed: Optional[int] = None
) -> Tuple[List[MechanismEvent], SimulationSummary]:
    """Simulate ``config`` and return its event log and summary."""
    return SimulationEngine(config, seed=seed).run()
