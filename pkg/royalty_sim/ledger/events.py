"""Event records and their JSONL encoding."""
from decimal import Decimal
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from royalty_sim.errors import ScenarioParseError


class EventKind(str, Enum):
    TRANSFER = "Transfer"
    DISCLOSE = "Disclose"
    DECLINE = "Decline"
    TAKE_BACK = "TakeBack"
    AUTO_BUY = "AutoBuy"
    AUTO_SALE_EXPIRED = "AutoSaleExpired"
    TURN_EXPIRED = "TurnExpired"


class MechanismEvent(BaseModel):
    """One timestamped move in the totally ordered log.

    Only the fields relevant to ``kind`` are set; ``None`` fields are omitted
    from the JSONL encoding.
    """

    model_config = ConfigDict(frozen=True, use_enum_values=False)

    seq: int
    time: int
    kind: EventKind
    accepted: bool = True
    error: Optional[str] = None
    actor: Optional[str] = None
    to: Optional[str] = None
    previous_owner: Optional[str] = None
    cost: Optional[Decimal] = None
    x: Optional[float] = None
    fee: Optional[Decimal] = None
    price: Optional[Decimal] = None
    expires_at: Optional[int] = None
    payment: Optional[Decimal] = None
    refund: Optional[Decimal] = None
    royalty: Optional[Decimal] = None
    balances_delta: Dict[str, Decimal] = Field(default_factory=dict)

    def to_json(self) -> str:
        return self.model_dump_json(exclude_none=True)


def dumps_jsonl(events: Iterable[MechanismEvent]) -> str:
    return "".join(event.to_json() + "\n" for event in events)


def write_jsonl(events: Iterable[MechanismEvent], path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_jsonl(events), encoding="utf-8")


def loads_jsonl(text: str) -> List[MechanismEvent]:
    events = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            events.append(MechanismEvent.model_validate_json(line))
        except ValueError as e:
            raise ScenarioParseError(str(e), location=f"line {lineno}") from e
    return events


def read_jsonl(path: Union[str, Path]) -> List[MechanismEvent]:
    return loads_jsonl(Path(path).read_text(encoding="utf-8"))
