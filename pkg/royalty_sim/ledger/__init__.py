"""The mechanism state machine: ownership, H, fee escrow and Rules 1-3."""
from royalty_sim.ledger.events import EventKind, MechanismEvent, read_jsonl, write_jsonl
from royalty_sim.ledger.history import reconstruct_h
from royalty_sim.ledger.ledger import Ledger
from royalty_sim.ledger.rules import (
    apply_auto_buy,
    apply_decline,
    apply_disclose,
    apply_expiry,
    apply_take_back,
    apply_transfer,
    apply_turn_expiry,
)
from royalty_sim.ledger.state import (
    Address,
    Listing,
    MechanismParams,
    PlayerSpec,
    TenureFee,
    TokenState,
)
