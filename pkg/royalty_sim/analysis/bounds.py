from decimal import Decimal
from typing import Optional

from pydantic import BaseModel, ConfigDict, field_validator

from royalty_sim.functions import FeeSpec, PriceSpec
from royalty_sim.money import to_money


class BoundsReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    sale_price: Decimal
    fmv_lower: Decimal
    avoidance_cap: Decimal
    arbitrage_profit: Optional[Decimal] = None

    @field_validator("avoidance_cap")
    @classmethod
    def _non_negative(cls, value: Decimal) -> Decimal:
        if value < 0:
            raise ValueError("avoidance cap cannot be negative")
        return value

    @property
    def verdict(self) -> Optional[str]:
        if self.arbitrage_profit is None:
            return None
        return "exploitable" if self.arbitrage_profit > 0 else "honest"


def _fee_for_price(c: float, fee: FeeSpec, price: PriceSpec) -> float:
    """phi(pi^-1(c)): the fee that makes the auto-sale price equal c."""
    return fee.evaluate(price.invert(c))


def fmv_lower_bound(sale_price, fee: FeeSpec, price: PriceSpec) -> Decimal:
    """c - phi(pi^-1(c)): below this the seller profits by buying the token back."""
    c = float(sale_price)
    return to_money(c - _fee_for_price(c, fee, price))


def arbitrage_profit(sale_price, disclosed_x: float, fee: FeeSpec, price: PriceSpec) -> Decimal:
    """Seller's gain from auto-buying at pi(x) and re-protecting at phi(pi^-1(c))."""
    c = float(sale_price)
    return to_money(c - price.evaluate(disclosed_x) - _fee_for_price(c, fee, price))


def avoidance_cap(sale_price, fee: FeeSpec) -> Decimal:
    """L_phi * phi(c), the most fee a buyer can avoid (rho^2 c for a linear fee)."""
    return to_money(fee.lipschitz * fee.evaluate(float(sale_price)))


def bounds_report(
    sale_price, fee: FeeSpec, price: PriceSpec, disclosed_x: Optional[float] = None
) -> BoundsReport:
    return BoundsReport(
        sale_price=to_money(sale_price),
        fmv_lower=fmv_lower_bound(sale_price, fee, price),
        avoidance_cap=avoidance_cap(sale_price, fee),
        arbitrage_profit=(
            arbitrage_profit(sale_price, disclosed_x, fee, price)
            if disclosed_x is not None
            else None
        ),
    )
