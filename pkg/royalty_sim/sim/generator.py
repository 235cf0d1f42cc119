"""Seeded random scenarios for batch runs and property tests."""
import logging
from typing import List, Optional

import numpy as np

from royalty_sim.functions import FeeSpec, PriceSpec
from royalty_sim.money import to_money
from royalty_sim.sim.scenario import (
    MechanismConfig,
    PlayerConfig,
    ScenarioConfig,
    ScriptedIntent,
    TokenConfig,
    check_invariants,
)

logger = logging.getLogger(__name__)

STARTING_BALANCE = 1_000_000


def random_scenario(
    seed: int,
    n_players: Optional[int] = None,
    n_sales: Optional[int] = None,
    mechanism: Optional[MechanismConfig] = None,
) -> ScenarioConfig:
    """An all-best-response scenario whose script sells the token ``n_sales`` times.

    Each sale goes from whoever owns the token at that moment to a random
    address at a random price, spaced so every auto-sale window can close.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    mechanism = mechanism or MechanismConfig()
    n_players = n_players or int(rng.integers(2, 6))
    n_sales = n_sales if n_sales is not None else int(rng.integers(1, 8))

    players: List[PlayerConfig] = []
    for index in range(n_players):
        n_addresses = int(rng.integers(1, 4))
        fmv = to_money(float(rng.uniform(1, 1000)))
        hodl = to_money(float(rng.uniform(0.5, 1.5)) * float(fmv))
        players.append(
            PlayerConfig(
                id=f"P{index}",
                addresses=[f"P{index}.{slot}" for slot in range(n_addresses)],
                fmv=fmv,
                hodl=hodl,
                balance=STARTING_BALANCE,
            )
        )

    if rng.random() < 0.5:
        price = PriceSpec.identity()
    else:
        price = PriceSpec(kind="linear", scale=round(float(rng.uniform(0.5, 2.0)), 4))
    fee = FeeSpec.linear(round(float(rng.uniform(0.01, 0.1)), 4))

    spacing = mechanism.d_turn + mechanism.w_window + 5
    addresses = [address for player in players for address in player.addresses]
    script = [
        ScriptedIntent(
            time=1 + sale * spacing,
            kind="transfer",
            to=addresses[int(rng.integers(len(addresses)))],
            cost=to_money(float(rng.uniform(1, 1000))),
        )
        for sale in range(n_sales)
    ]

    config = ScenarioConfig(
        players=players,
        token=TokenConfig(initial_owner=players[0].addresses[0], fee=fee, price=price),
        mechanism=mechanism,
        script=script,
        horizon=1 + (n_sales + 1) * spacing,
        seed=seed,
    )
    logger.debug(f"Generated scenario for seed {seed}: {n_players} players, {n_sales} sales")
    return check_invariants(config)
