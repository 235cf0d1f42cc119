import copy
import json
from decimal import Decimal
from typing import Any, Dict

import pytest

from royalty_sim.functions import FeeSpec, PriceSpec
from royalty_sim.ledger import Ledger, MechanismParams
from royalty_sim.sim import ScenarioConfig, parse_scenario

BASE_SCENARIO: Dict[str, Any] = {
    "players": [
        {"id": "alice", "addresses": ["A"], "fmv": "80", "hodl": "90", "balance": "1000"},
        {"id": "bob", "addresses": ["B1", "B2"], "fmv": "100", "hodl": "120", "balance": "1000"},
    ],
    "token": {
        "creator": "creator",
        "initial_owner": "A",
        "fee": {"kind": "linear", "rho": 0.05},
        "price": {"kind": "identity"},
    },
    "mechanism": {"d_turn": 10, "w_window": 100},
    "script": [{"time": 1, "kind": "transfer", "from": "A", "to": "B1", "cost": "90"}],
    "horizon": 150,
    "seed": 7,
}


@pytest.fixture
def linear_fee() -> FeeSpec:
    return FeeSpec.linear(0.05)


@pytest.fixture
def identity_price() -> PriceSpec:
    return PriceSpec.identity()


@pytest.fixture
def params(linear_fee, identity_price) -> MechanismParams:
    return MechanismParams(
        fee=linear_fee,
        price=identity_price,
        d_turn=10,
        w_window=100,
        directory={"A": "alice", "B1": "bob", "B2": "bob", "C": "carol"},
    )


@pytest.fixture
def ledger(params) -> Ledger:
    balances = {"alice": Decimal("1000"), "bob": Decimal("1000"), "carol": Decimal("1000")}
    return Ledger.open(params, owner="A", balances=balances)


@pytest.fixture
def scenario_data() -> Dict[str, Any]:
    """A fresh copy of a two-player scenario: alice sells to bob at tick 1."""
    return copy.deepcopy(BASE_SCENARIO)


@pytest.fixture
def base_config(scenario_data) -> ScenarioConfig:
    return parse_scenario(scenario_data)


@pytest.fixture
def scenario_file(tmp_path, scenario_data):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(scenario_data), encoding="utf-8")
    return path
