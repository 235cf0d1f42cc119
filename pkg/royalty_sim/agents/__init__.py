"""Player decision logic: utilities, best responses and deviations."""
from royalty_sim.agents.oracle import brute_force_best_x, grid_step
from royalty_sim.agents.player_agent import PlayerAgent, admissible_disclosure
from royalty_sim.agents.strategy import (
    ArbitrageBot,
    BestResponse,
    NeverDisclose,
    Overreport,
    SelfTransferer,
    StrategyKind,
    Underreport,
    best_response_disclosure,
    should_auto_buy,
    should_take_back,
)
from royalty_sim.agents.utility import (
    aggregate_utility,
    supremum_utility,
    utility_keep,
    utility_resell,
)
