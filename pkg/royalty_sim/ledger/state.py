from decimal import Decimal
from typing import Dict, FrozenSet, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from royalty_sim.functions import FeeSpec, PriceSpec
from royalty_sim.money import ZERO, to_money

Address = str


class PlayerSpec(BaseModel):
    """A player: a private set of addresses plus their valuations of the token."""

    model_config = ConfigDict(frozen=True)

    id: str
    addresses: FrozenSet[Address]
    fmv: Decimal = Field(ge=0, description="m_P, estimate of the free-market value.")
    hodl: Decimal = Field(ge=0, description="v_P, self-assessed long-term value.")
    balance: Decimal = Field(default=ZERO, ge=0)

    @field_validator("fmv", "hodl", "balance")
    @classmethod
    def _round(cls, value: Decimal) -> Decimal:
        return to_money(value)

    @field_validator("addresses")
    @classmethod
    def _non_empty(cls, value: FrozenSet[Address]) -> FrozenSet[Address]:
        if not value:
            raise ValueError("a player needs at least one address")
        return value

    def controls(self, address: Address) -> bool:
        return address in self.addresses

    def sorted_addresses(self) -> List[Address]:
        return sorted(self.addresses)


class TenureFee(BaseModel):
    """The disclosure made (and fee paid) during the current tenure."""

    model_config = ConfigDict(frozen=True)

    x: float
    fee: Decimal
    escrowed: Decimal


class Listing(BaseModel):
    model_config = ConfigDict(frozen=True)

    price: Decimal
    expires_at: int


class MechanismParams(BaseModel):
    """Everything a move needs besides the state: phi, pi, durations, directory."""

    model_config = ConfigDict(frozen=True)

    fee: FeeSpec
    price: PriceSpec
    d_turn: int = Field(default=10, gt=0)
    w_window: int = Field(default=100, gt=0)
    directory: Dict[Address, str] = Field(
        default_factory=dict, description="Address -> controlling player id."
    )

    def player_of(self, address: Address) -> Optional[str]:
        return self.directory.get(address)


class TokenState(BaseModel):
    """Public state of one token plus the players' balances."""

    model_config = ConfigDict(frozen=True)

    owner: Address
    history_set: FrozenSet[Address] = frozenset()
    tenure_fee: Optional[TenureFee] = None
    listing: Optional[Listing] = None
    first_move_deadline: Optional[int] = None
    creator_account: Decimal = ZERO
    balances: Dict[str, Decimal] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_invariants(self) -> "TokenState":
        problems = self.violations()
        if problems:
            raise ValueError("; ".join(problems))
        return self

    def violations(self) -> List[str]:
        problems = []
        if self.owner in self.history_set:
            problems.append("owner must not be a member of H")
        if self.listing is not None and self.tenure_fee is None:
            problems.append("a listing requires a disclosure")
        if self.tenure_fee is not None and self.history_set:
            problems.append("H must be empty once the owner paid")
        return problems

    @property
    def escrow(self) -> Decimal:
        return self.tenure_fee.escrowed if self.tenure_fee is not None else ZERO

    @property
    def turn_open(self) -> bool:
        return self.first_move_deadline is not None

    def listing_active(self, now: int) -> bool:
        return self.listing is not None and now < self.listing.expires_at

    def total_funds(self) -> Decimal:
        """Balances plus escrow plus creator royalties (conserved by every move)."""
        return sum(self.balances.values(), ZERO) + self.escrow + self.creator_account

    def balance_of(self, player_id: str) -> Decimal:
        return self.balances.get(player_id, ZERO)
