"""Scenario schema, loading and invariant checks."""
import json
import logging
from decimal import Decimal
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from royalty_sim.agents.strategy import BestResponse, StrategyKind
from royalty_sim.config import get_config
from royalty_sim.errors import ScenarioInvariantError, ScenarioParseError
from royalty_sim.functions import FeeSpec, PriceSpec
from royalty_sim.ledger.state import Address, MechanismParams, PlayerSpec
from royalty_sim.money import ZERO, to_money

logger = logging.getLogger(__name__)


def _default_d_turn() -> int:
    return get_config().mechanism.d_turn


def _default_w_window() -> int:
    return get_config().mechanism.w_window


class PlayerConfig(BaseModel):
    id: str
    addresses: List[Address] = Field(min_length=1)
    fmv: Decimal = Field(ge=0)
    hodl: Decimal = Field(ge=0)
    balance: Decimal = Field(default=ZERO, ge=0)
    strategy: StrategyKind = Field(default_factory=BestResponse)

    @field_validator("fmv", "hodl", "balance")
    @classmethod
    def _round(cls, value: Decimal) -> Decimal:
        return to_money(value)

    def to_spec(self) -> PlayerSpec:
        return PlayerSpec(
            id=self.id,
            addresses=frozenset(self.addresses),
            fmv=self.fmv,
            hodl=self.hodl,
            balance=self.balance,
        )


class TokenConfig(BaseModel):
    creator: str = "creator"
    initial_owner: Address
    fee: FeeSpec
    price: PriceSpec


class MechanismConfig(BaseModel):
    d_turn: int = Field(default_factory=_default_d_turn, gt=0)
    w_window: int = Field(default_factory=_default_w_window, gt=0)


class ScriptedIntent(BaseModel):
    """A forced move at ``time``; overrides the agents' own decisions.

    ``from`` defaults to the owner at application time, ``payment`` to the
    listed price. ``wait`` suppresses the owner's first move for that tick.
    """

    model_config = ConfigDict(populate_by_name=True)

    time: int = Field(ge=0)
    kind: Literal["transfer", "disclose", "decline", "take_back", "auto_buy", "wait"]
    from_address: Optional[Address] = Field(default=None, alias="from")
    to: Optional[Address] = None
    cost: Decimal = ZERO
    x: Optional[float] = None
    claimant: Optional[Address] = None
    buyer: Optional[Address] = None
    payment: Optional[Decimal] = None

    @field_validator("cost", "payment")
    @classmethod
    def _round(cls, value: Optional[Decimal]) -> Optional[Decimal]:
        return to_money(value) if value is not None else None

    @model_validator(mode="after")
    def _check_arguments(self) -> "ScriptedIntent":
        required = {"transfer": "to", "disclose": "x", "take_back": "claimant", "auto_buy": "buyer"}
        field = required.get(self.kind)
        if field is not None and getattr(self, field) is None:
            raise ValueError(f"{self.kind} intent requires '{field}'")
        return self


class ScenarioConfig(BaseModel):
    players: List[PlayerConfig] = Field(min_length=1)
    token: TokenConfig
    mechanism: MechanismConfig = Field(default_factory=MechanismConfig)
    script: List[ScriptedIntent] = Field(default_factory=list)
    horizon: int
    seed: int = Field(default=0, ge=0)

    def directory(self) -> Dict[Address, str]:
        return {address: player.id for player in self.players for address in player.addresses}

    def params(self) -> MechanismParams:
        return MechanismParams(
            fee=self.token.fee,
            price=self.token.price,
            d_turn=self.mechanism.d_turn,
            w_window=self.mechanism.w_window,
            directory=self.directory(),
        )

    def player(self, player_id: str) -> PlayerConfig:
        for player in self.players:
            if player.id == player_id:
                return player
        raise KeyError(player_id)

    def all_best_response(self) -> bool:
        return all(isinstance(player.strategy, BestResponse) for player in self.players)

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)


def check_invariants(config: ScenarioConfig) -> ScenarioConfig:
    ids = [player.id for player in config.players]
    if len(ids) != len(set(ids)):
        raise ScenarioInvariantError("unique player ids", f"duplicates in {sorted(ids)}")
    seen: Dict[Address, str] = {}
    for player in config.players:
        for address in player.addresses:
            if address in seen and seen[address] != player.id:
                raise ScenarioInvariantError(
                    "disjoint address sets",
                    f"{address} is claimed by {seen[address]} and {player.id}",
                )
            seen[address] = player.id
    if config.token.initial_owner not in seen:
        raise ScenarioInvariantError(
            "initial owner belongs to a player", f"{config.token.initial_owner} is unclaimed"
        )
    if config.horizon <= 0:
        raise ScenarioInvariantError("positive horizon", f"got {config.horizon}")
    return config


def parse_scenario(data: Union[dict, str]) -> ScenarioConfig:
    """Validate a scenario given as a dict or JSON text."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise ScenarioParseError(e.msg, location=f"line {e.lineno}") from e
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ScenarioParseError(first["msg"], location=field) from e
    return check_invariants(config)


def load_scenario(path: Union[str, Path]) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioParseError(f"cannot read scenario: {e.strerror}", location=str(path)) from e
    config = parse_scenario(text)
    logger.info(
        f"Loaded scenario {path.name}: {len(config.players)} players, horizon {config.horizon}"
    )
    return config
