import math
from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from royalty_sim.errors import InvalidAmountError, SpecDomainError, SpecRangeError
from royalty_sim.functions import (
    FeeSpec,
    PriceSpec,
    fee_eval,
    lipschitz_estimate,
    price_eval,
    price_invert,
)
from royalty_sim.money import MINOR_UNIT, to_money

TABLE_PRICE = PriceSpec(kind="monotone-table", table=((1.0, 2.0), (10.0, 20.0), (100.0, 110.0)))
TABLE_FEE = FeeSpec(kind="monotone-table", table=((1.0, 0.05), (100.0, 5.0), (200.0, 13.0)))


def test_linear_fee_is_exact_in_minor_units(linear_fee):
    assert fee_eval(linear_fee, 100) == Decimal("5.000000")
    assert fee_eval(FeeSpec.linear(0.035), 100) == Decimal("3.500000")


def test_fee_is_clamped_to_one_minor_unit(linear_fee):
    assert fee_eval(linear_fee, 1e-9) == MINOR_UNIT


def test_price_identity_round_trip(identity_price):
    assert price_eval(identity_price, 42.5) == Decimal("42.500000")
    assert price_invert(identity_price, 42.5) == 42.5


def test_linear_price_inverts_exactly():
    price = PriceSpec(kind="linear", scale=2.0)
    assert price.evaluate(30.0) == 60.0
    assert price.invert(60.0) == 30.0


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_non_positive_or_non_finite_inputs_are_rejected(linear_fee, identity_price, bad):
    with pytest.raises(SpecDomainError):
        linear_fee.evaluate(bad)
    with pytest.raises(SpecDomainError):
        identity_price.evaluate(bad)


def test_table_interpolates_between_samples():
    assert TABLE_PRICE.evaluate(5.5) == pytest.approx(11.0)
    assert TABLE_FEE.evaluate(150.0) == pytest.approx(9.0)


def test_table_outside_its_samples_is_a_range_error():
    with pytest.raises(SpecRangeError):
        TABLE_PRICE.evaluate(200.0)
    with pytest.raises(SpecRangeError):
        TABLE_PRICE.invert(500.0)


def test_table_inversion_hits_the_endpoints_exactly():
    assert TABLE_PRICE.invert(2.0) == 1.0
    assert TABLE_PRICE.invert(110.0) == 100.0


@given(st.floats(min_value=2.0, max_value=110.0))
def test_table_inversion_is_within_tolerance(m):
    x = TABLE_PRICE.invert(m)
    assert abs(TABLE_PRICE.evaluate(x) - m) <= 1e-9


def test_non_monotone_table_is_rejected():
    with pytest.raises(ValidationError):
        PriceSpec(kind="monotone-table", table=((1.0, 5.0), (2.0, 4.0)))
    with pytest.raises(ValidationError):
        FeeSpec(kind="monotone-table", table=((1.0, 0.5), (2.0, 0.5)))


def test_fee_must_be_a_contraction():
    with pytest.raises(ValidationError):
        FeeSpec(kind="monotone-table", table=((1.0, 1.0), (2.0, 3.0)))
    with pytest.raises(ValidationError):
        FeeSpec.linear(1.0)
    with pytest.raises(ValidationError):
        FeeSpec(kind="linear", rho=0.05, declared_lipschitz=0.01)


def test_declared_lipschitz_defaults_to_the_steepest_slope():
    assert FeeSpec.linear(0.05).lipschitz == 0.05
    assert TABLE_FEE.lipschitz == pytest.approx(0.08)
    declared = FeeSpec(kind="monotone-table", table=TABLE_FEE.table, declared_lipschitz=0.09)
    assert declared.lipschitz == 0.09


def test_lipschitz_estimate_on_linear_fee_is_rho(linear_fee):
    assert lipschitz_estimate(linear_fee, [1.0, 2.0, 50.0]) == 0.05


def test_lipschitz_estimate_on_table_fee():
    grid = np.linspace(1.0, 200.0, 400)
    assert lipschitz_estimate(TABLE_FEE, grid) == pytest.approx(0.08, rel=1e-6)


@pytest.mark.parametrize("grid", [[1.0], [1.0, 1.0, 2.0], [2.0, 1.0]])
def test_lipschitz_estimate_rejects_bad_grids(linear_fee, grid):
    with pytest.raises(SpecDomainError):
        lipschitz_estimate(linear_fee, grid)


def test_vectorised_evaluation_matches_scalar(linear_fee):
    xs = np.array([1.0, 10.0, 100.0])
    assert np.allclose(linear_fee.evaluate(xs), [linear_fee.evaluate(x) for x in xs])


def test_money_rounds_half_up():
    assert to_money("1.0000005") == Decimal("1.000001")
    assert to_money(0.1) == Decimal("0.100000")


@pytest.mark.parametrize("bad", [1e24, 10**30, "1e40", float("inf"), float("nan"), "abc", None])
def test_unrepresentable_money_is_an_invalid_amount(bad):
    with pytest.raises(InvalidAmountError):
        to_money(bad)
