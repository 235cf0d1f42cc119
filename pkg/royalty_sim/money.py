"""Exact currency amounts.

Ledger arithmetic runs on ``Decimal`` values quantized to a fixed number of
decimal places (the minor unit) with ROUND_HALF_UP, so balances are conserved
bit-exactly and event logs replay byte-for-byte.
"""
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation
from typing import Union

from royalty_sim.errors import InvalidAmountError

MONEY_SCALE = 6
MINOR_UNIT = Decimal(1).scaleb(-MONEY_SCALE)
ZERO = Decimal(0).quantize(MINOR_UNIT)

Amount = Union[Decimal, int, float, str]


def to_money(value: Amount) -> Decimal:
    """Round a value to the nearest minor unit, halves away from zero.

    Raises ``InvalidAmountError`` for non-finite values and for amounts too
    large to hold at minor-unit precision.
    """
    if isinstance(value, float):
        # shortest round-tripping digits
        value = repr(value)
    try:
        money = Decimal(value).quantize(MINOR_UNIT, rounding=ROUND_HALF_UP)
    except (InvalidOperation, TypeError):
        raise InvalidAmountError(f"{value} is not a representable amount") from None
    if not money.is_finite():
        raise InvalidAmountError(f"{value} is not a finite amount")
    return money
