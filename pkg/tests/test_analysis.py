import math
from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from royalty_sim.analysis import (
    CollusionContract,
    arbitrage_profit,
    avoidance_cap,
    bounds_report,
    collusion_feasible,
    collusion_limit,
    collusion_limit_linear,
    find_feasible_collusion,
    fmv_lower_bound,
    lockup_discount,
)
from royalty_sim.analysis.collusion import LOWER_BRIBE, LOWER_COLLATERAL, TOTAL_BRIBE
from royalty_sim.errors import SpecDomainError
from royalty_sim.functions import FeeSpec, PriceSpec
from royalty_sim.ledger import Ledger
from royalty_sim.money import MINOR_UNIT

RATE = 0.035


class TestCollusionLimit:
    def test_linear_bound_is_rho_over_rate(self):
        assert collusion_limit_linear(0.035, RATE) == pytest.approx(1.0)

    def test_approximate_bound(self):
        assert collusion_limit(3.5, 100, RATE).approx_tn_bound == pytest.approx(1.0)

    def test_lockup_discount(self):
        assert lockup_discount(RATE, 1) == pytest.approx(0.034395, abs=1e-6)
        assert lockup_discount(RATE, 1) == pytest.approx(1 - math.exp(-RATE))

    def test_one_colluder_for_one_year_is_infeasible(self):
        limit = collusion_limit(3.5, 100, RATE, lockup=1, n=1)
        assert limit.exact_ratio == pytest.approx(3.5 / (limit.discount * 100))
        assert not limit.symmetric_feasible

    def test_twelve_colluders_for_a_month_is_infeasible(self):
        assert not collusion_limit(3.5, 100, RATE, lockup=1 / 12, n=12).symmetric_feasible

    def test_necessary_condition_is_not_sufficient(self):
        limit = collusion_limit(3.5, 100, RATE, lockup=1, n=1)
        assert limit.necessary_condition_holds
        assert not limit.symmetric_feasible

    @pytest.mark.parametrize("bad", [(0, 100, RATE), (3.5, 0, RATE), (3.5, 100, 0)])
    def test_non_positive_inputs(self, bad):
        with pytest.raises(SpecDomainError):
            collusion_limit(*bad)

    def test_non_positive_colluders(self):
        with pytest.raises(SpecDomainError):
            collusion_limit(3.5, 100, RATE, lockup=1, n=0)


class TestFeasibility:
    def test_witness_satisfies_every_inequality(self):
        bribe, collateral = find_feasible_collusion(5, 120, RATE, 1, 1)
        contract = CollusionContract.symmetric(1, bribe, collateral, 1, RATE, 120, 5)
        assert collusion_feasible(contract) == (True, [])

    def test_two_colluders_cannot_share_a_small_fee(self):
        assert find_feasible_collusion(5, 120, RATE, 1, 2) is None

    def test_no_collateral_covers_the_bribe_when_lambda_n_reaches_one(self):
        assert find_feasible_collusion(1000, 1, RATE, 1, 30) is None

    @pytest.mark.parametrize(
        "bribe, collateral, violated",
        [
            (6.0, 127.0, [TOTAL_BRIBE]),
            (4.5, 200.0, [LOWER_BRIBE]),
            (4.5, 100.0, [LOWER_COLLATERAL]),
        ],
    )
    def test_names_each_violated_inequality(self, bribe, collateral, violated):
        contract = CollusionContract.symmetric(1, bribe, collateral, 1, RATE, 120, 5)
        assert collusion_feasible(contract) == (False, violated)

    def test_hand_built_contract_is_feasible(self):
        contract = CollusionContract.symmetric(1, 4.5, 127.0, 1, RATE, 120, 5)
        assert collusion_feasible(contract) == (True, [])

    def test_mismatched_lengths_are_rejected(self):
        with pytest.raises(ValueError):
            CollusionContract(
                n_colluders=2,
                bribes=(1.0,),
                collaterals=(1.0, 1.0),
                lockup=1,
                rate=RATE,
                hodl=1,
                fee_at_xp=1,
            )


class TestBounds:
    def test_fmv_lower_bound(self, linear_fee, identity_price):
        assert fmv_lower_bound(100, linear_fee, identity_price) == Decimal("95")

    def test_avoidance_cap(self, linear_fee):
        assert avoidance_cap(100, linear_fee) == Decimal("0.25")
        assert avoidance_cap(100, FeeSpec.linear(0.035)) == Decimal("0.1225")

    @pytest.mark.parametrize("x, profit", [(90.0, "5"), (95.0, "0"), (100.0, "-5")])
    def test_arbitrage_profit(self, linear_fee, identity_price, x, profit):
        assert arbitrage_profit(100, x, linear_fee, identity_price) == Decimal(profit)

    def test_report_verdict(self, linear_fee, identity_price):
        assert bounds_report(100, linear_fee, identity_price, 90.0).verdict == "exploitable"
        assert bounds_report(100, linear_fee, identity_price, 100.0).verdict == "honest"
        assert bounds_report(100, linear_fee, identity_price).verdict is None

    def test_scaled_price_bound(self, linear_fee):
        price = PriceSpec(kind="linear", scale=2.0)
        # pi^-1(100) = 50, phi(50) = 2.5
        assert fmv_lower_bound(100, linear_fee, price) == Decimal("97.5")


def test_arbitrage_round_trip_matches_the_closed_form(ledger, linear_fee, identity_price):
    ledger.transfer(0, "A", "B1", "100")
    ledger.disclose(1, 90.0)
    ledger.auto_buy(2, "A", ledger.state.listing.price)
    ledger.disclose(3, identity_price.invert(100.0))
    gained = ledger.state.balance_of("alice") - Decimal("1000")
    assert gained == arbitrage_profit(100, 90.0, linear_fee, identity_price)
    assert ledger.state.owner == "A"
    assert all(event.accepted for event in ledger.events)


def symmetric_grid_has_a_feasible_point(fee, hodl, rate, lockup, n, steps=300):
    """Exhaustive (bribe, collateral) grid over every candidate symmetric contract."""
    lam = lockup_discount(rate, lockup)
    bribes = (fee / n) * np.arange(1, steps + 1) / (steps + 1)
    collaterals = np.linspace(hodl, max(fee / (n * lam), hodl) * 1.01, steps)
    beta, kappa = bribes[:, None], collaterals[None, :]
    feasible = (n * beta < fee) & (beta > lam * kappa) & (kappa > hodl + n * beta)
    return bool(feasible.any())


def test_witness_search_agrees_with_a_grid_search():
    rng = np.random.Generator(np.random.PCG64(11))
    outcomes = []
    for i in range(50):
        rate, lockup = float(rng.uniform(0.01, 0.1)), float(rng.uniform(0.1, 2.0))
        n, hodl = int(rng.integers(1, 3)), float(rng.uniform(10, 200))
        lam = lockup_discount(rate, lockup)
        threshold = lam * hodl / (1 - lam * n)
        # half the sets sit clearly inside the feasible region, half clearly outside
        margin = rng.uniform(1.5, 5.0) if i % 2 == 0 else rng.uniform(0.2, 0.8)
        fee = float(margin * n * threshold)
        witness = find_feasible_collusion(fee, hodl, rate, lockup, n)
        assert (witness is not None) == symmetric_grid_has_a_feasible_point(
            fee, hodl, rate, lockup, n
        )
        outcomes.append(witness is not None)
    assert outcomes.count(True) == outcomes.count(False) == 25


def random_contract(rng):
    n = int(rng.integers(1, 5))
    fee, hodl = float(rng.uniform(1, 50)), float(rng.uniform(1, 200))
    rate, lockup = float(rng.uniform(0.01, 0.2)), float(rng.uniform(0.05, 3.0))
    lam = lockup_discount(rate, lockup)
    bribes = rng.uniform(0, 1.1 * fee / n, size=n)
    floor = hodl + bribes.sum()
    collaterals = [
        float(rng.uniform(floor - 5, max(beta / lam, floor) + 5)) for beta in bribes
    ]
    return CollusionContract(
        n_colluders=n,
        bribes=tuple(float(beta) for beta in bribes),
        collaterals=tuple(max(kappa, 0.0) for kappa in collaterals),
        lockup=lockup,
        rate=rate,
        hodl=hodl,
        fee_at_xp=fee,
    )


@pytest.mark.slow
def test_feasible_contracts_satisfy_the_necessary_condition():
    rng = np.random.Generator(np.random.PCG64(12))
    feasible_count = 0
    for _ in range(10_000):
        contract = random_contract(rng)
        feasible, _ = collusion_feasible(contract)
        if not feasible:
            continue
        feasible_count += 1
        lam, n = contract.discount, contract.n_colluders
        total_bribe = sum(contract.bribes)
        assert contract.fee_at_xp > total_bribe > lam * sum(contract.collaterals)
        collateral = lam * sum(contract.collaterals)
        assert collateral > lam * n * (contract.hodl + total_bribe) * (1 - 1e-12)
        assert contract.fee_at_xp > lam * n * contract.hodl
    assert feasible_count > 0


class TestMonotonicity:
    def test_contracts_stay_infeasible(self):
        rng = np.random.Generator(np.random.PCG64(13))
        for _ in range(500):
            contract = random_contract(rng)
            if collusion_feasible(contract)[0]:
                continue
            factor = float(rng.uniform(1.0, 3.0))
            for field in ("lockup", "rate", "hodl"):
                harder = contract.model_copy(update={field: getattr(contract, field) * factor})
                assert not collusion_feasible(harder)[0], field

    def test_no_witness_stays_no_witness(self):
        rng = np.random.Generator(np.random.PCG64(14))
        for _ in range(500):
            fee, hodl = float(rng.uniform(1, 50)), float(rng.uniform(1, 200))
            rate, lockup = float(rng.uniform(0.01, 0.2)), float(rng.uniform(0.05, 3.0))
            n = int(rng.integers(1, 5))
            if find_feasible_collusion(fee, hodl, rate, lockup, n) is not None:
                continue
            factor = float(rng.uniform(1.0, 3.0))
            assert find_feasible_collusion(fee, hodl, rate, lockup * factor, n) is None
            assert find_feasible_collusion(fee, hodl, rate * factor, lockup, n) is None
            assert find_feasible_collusion(fee, hodl * factor, rate, lockup, n) is None
            assert find_feasible_collusion(fee, hodl, rate, lockup, n + 1) is None


@given(
    rate=st.floats(min_value=1e-4, max_value=0.2),
    share=st.floats(min_value=1e-3, max_value=1.0),
)
def test_linear_discount_is_within_two_point_six_percent(rate, share):
    lockup = 0.05 * share / rate
    rt = rate * lockup
    assert abs(lockup_discount(rate, lockup) - rt) / rt <= 0.026


@pytest.mark.parametrize(
    "fee",
    [
        FeeSpec.linear(0.05),
        FeeSpec.linear(0.09),
        FeeSpec(kind="monotone-table", table=((1.0, 0.05), (100.0, 5.0), (200.0, 13.0))),
    ],
    ids=["linear-5", "linear-9", "table"],
)
def test_avoidance_cap_bounds_the_fee_gap(fee, identity_price):
    lo, hi = fee.domain
    for c in np.linspace(max(lo, 1.0) * 2, min(hi, 1000.0), 60):
        lower = float(fmv_lower_bound(c, fee, identity_price))
        cap = float(avoidance_cap(c, fee))
        others = np.linspace(max(lower, lo), c, 50)
        gaps = np.abs(fee.evaluate(c) - fee.evaluate(others))
        assert gaps.max() <= cap + float(MINOR_UNIT)


def test_arbitrage_sign_matches_the_round_trip(params, linear_fee, identity_price):
    rng = np.random.Generator(np.random.PCG64(15))
    for _ in range(1000):
        c = round(float(rng.uniform(1, 500)), 2)
        x = round(float(rng.uniform(0.1, 1.5)) * c, 4)
        ledger = Ledger.open(
            params, owner="A", balances={"alice": Decimal("1000"), "bob": Decimal("1000")}
        )
        ledger.transfer(0, "A", "B1", c)
        ledger.disclose(1, x)
        ledger.auto_buy(2, "A", ledger.state.listing.price)
        ledger.disclose(3, identity_price.invert(c))
        assert all(event.accepted for event in ledger.events)
        assert ledger.state.owner == "A"

        gained = ledger.state.balance_of("alice") - Decimal("1000")
        profit = arbitrage_profit(c, x, linear_fee, identity_price)
        assert abs(gained - profit) <= 2 * MINOR_UNIT
        if profit > MINOR_UNIT:
            assert gained > 0
        elif profit < -MINOR_UNIT:
            assert gained < 0
