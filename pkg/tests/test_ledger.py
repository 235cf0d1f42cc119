from decimal import Decimal

import pytest

from royalty_sim.errors import EventOrderError, NotEntitledError, ScenarioParseError
from royalty_sim.ledger import EventKind, Ledger, reconstruct_h
from royalty_sim.ledger.events import dumps_jsonl, loads_jsonl, read_jsonl, write_jsonl


class TestReconstructH:
    def test_starts_at_the_last_fee_payer(self):
        assert reconstruct_h([("A", True), ("B", False), ("C", False)]) == {"A", "B"}

    def test_empty_once_the_current_owner_paid(self):
        assert reconstruct_h([("A", False), ("B", True)]) == frozenset()

    def test_distinct_addresses_without_fees(self):
        history = [("A", False), ("B", False), ("A", False), ("C", False)]
        assert reconstruct_h(history) == {"A", "B"}

    def test_excludes_the_current_owner(self):
        assert reconstruct_h([("A", False), ("B", False), ("A", False)]) == {"B"}

    def test_empty_history(self):
        assert reconstruct_h([]) == frozenset()


class TestLedger:
    def test_accepted_events_carry_deltas(self, ledger):
        event = ledger.transfer(0, "A", "B1", "100")
        assert event.accepted
        assert event.seq == 0
        assert event.balances_delta == {"alice": Decimal("100"), "bob": Decimal("-100")}

    def test_disclose_event_reports_fee_and_listing(self, ledger):
        ledger.transfer(0, "A", "B1", "100")
        event = ledger.disclose(1, 100.0)
        assert event.kind == EventKind.DISCLOSE
        assert event.fee == Decimal("5")
        assert event.price == Decimal("100")
        assert event.expires_at == 101
        assert event.balances_delta == {"bob": Decimal("-5")}

    def test_rejected_moves_are_logged_and_change_nothing(self, ledger):
        before = ledger.state
        event = ledger.take_back(0, "C")
        assert not event.accepted
        assert "take-back" in event.error
        assert ledger.state == before
        assert ledger.events == [event]

    def test_unrepresentable_fee_is_a_rejection(self, ledger):
        ledger.transfer(0, "A", "B1", "100")
        before = ledger.state
        event = ledger.disclose(1, 1e24)
        assert not event.accepted
        assert "not a representable amount" in event.error
        assert ledger.state == before
        assert ledger.disclose(1, 100.0).accepted

    def test_unrepresentable_cost_is_logged_without_an_amount(self, ledger):
        event = ledger.transfer(0, "A", "B1", 10**40)
        assert not event.accepted
        assert event.cost is None
        assert ledger.state.owner == "A"

    def test_strict_mode_re_raises(self, params):
        strict = Ledger.open(params, owner="A", balances={"alice": 10}, strict=True)
        with pytest.raises(NotEntitledError):
            strict.take_back(0, "C")
        assert len(strict.events) == 1

    def test_time_cannot_go_backwards(self, ledger):
        ledger.transfer(5, "A", "B1", "0")
        with pytest.raises(EventOrderError):
            ledger.decline(4)

    def test_expiry_records_the_royalty(self, ledger):
        ledger.transfer(0, "A", "B1", "100")
        ledger.disclose(1, 100.0)
        assert ledger.expire_listing(50) is None
        event = ledger.expire_listing(101)
        assert event.kind == EventKind.AUTO_SALE_EXPIRED
        assert event.royalty == Decimal("5")
        assert event.balances_delta == {}
        assert len(ledger.events) == 3

    def test_ownership_history_tracks_h(self, ledger):
        ledger.transfer(0, "A", "B1", "0")
        ledger.decline(1)
        ledger.transfer(2, "B1", "C", "0")
        assert reconstruct_h(ledger.ownership_history) == ledger.state.history_set == {"A", "B1"}
        ledger.disclose(3, 10.0)
        assert reconstruct_h(ledger.ownership_history) == frozenset()

    def test_auto_buy_event_names_the_refund(self, ledger):
        ledger.transfer(0, "A", "B1", "100")
        ledger.disclose(1, 100.0)
        event = ledger.auto_buy(2, "C", "100")
        assert event.previous_owner == "B1"
        assert event.refund == Decimal("5")
        assert event.balances_delta == {"bob": Decimal("105"), "carol": Decimal("-100")}


class TestJsonl:
    def test_amounts_are_exact_strings(self, ledger):
        ledger.transfer(0, "A", "B1", "100")
        ledger.disclose(1, 100.0)
        line = ledger.events[1].to_json()
        assert '"fee":"5.000000"' in line
        assert '"kind":"Disclose"' in line
        assert "previous_owner" not in line

    def test_file_round_trip(self, ledger, tmp_path):
        ledger.transfer(0, "A", "B1", "100")
        ledger.disclose(1, 100.0)
        ledger.take_back(2, "Z")
        path = tmp_path / "events.jsonl"
        write_jsonl(ledger.events, path)
        assert read_jsonl(path) == ledger.events
        assert dumps_jsonl(read_jsonl(path)) == path.read_text()

    def test_bad_line_names_its_number(self):
        with pytest.raises(ScenarioParseError, match="line 2"):
            loads_jsonl('{"seq":0,"time":0,"kind":"Decline"}\n{"seq":1,"time":"soon"}\n')
