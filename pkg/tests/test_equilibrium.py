import pytest

from royalty_sim.errors import ConfigurationError
from royalty_sim.sim import (
    check_desiderata,
    parse_scenario,
    random_scenario,
    run,
    verify_equilibrium,
)


SEEDS = [seed if seed < 20 else pytest.param(seed, marks=pytest.mark.slow) for seed in range(100)]


@pytest.mark.parametrize("seed", SEEDS)
def test_best_response_runs_pass(seed):
    report = verify_equilibrium(random_scenario(seed))
    assert report.passed, report
    assert report.skipped == 0


def test_base_scenario_passes(base_config):
    report = verify_equilibrium(base_config, grid_steps=1000)
    assert report.passed
    assert report.checked == 1


def test_underreporting_is_flagged(scenario_data):
    scenario_data["players"][0]["fmv"] = "40"
    scenario_data["players"][1]["strategy"] = {"kind": "underreport", "factor": 0.5}
    config = parse_scenario(scenario_data)
    report = verify_equilibrium(config, allow_mixed=True)
    assert not report.passed
    [record] = report.deviations
    assert (record.seq, record.player, record.disclosed_x) == (1, "bob", 50.0)
    assert abs(record.oracle_x - 100.0) <= record.grid_step


def test_mixed_strategies_need_explicit_consent(scenario_data):
    scenario_data["players"][1]["strategy"] = {"kind": "underreport", "factor": 0.5}
    with pytest.raises(ConfigurationError):
        verify_equilibrium(parse_scenario(scenario_data))


def test_keep_dominant_buyer_still_discloses_truthfully(scenario_data):
    scenario_data["players"][1]["hodl"] = "500"
    report = verify_equilibrium(parse_scenario(scenario_data))
    assert report.passed
    assert report.checked == 1


def test_fmv_outside_the_price_image_is_skipped(scenario_data):
    scenario_data["players"][0]["fmv"] = "10"
    scenario_data["token"]["price"] = {
        "kind": "monotone-table",
        "table": [[1.0, 1.0], [50.0, 60.0]],
    }
    report = verify_equilibrium(parse_scenario(scenario_data))
    assert report.checked == 0
    assert report.skipped == 1


class TestDesiderata:
    def test_clean_run_has_none(self, base_config):
        events, summary = run(base_config)
        assert check_desiderata(base_config, events, summary) == []

    def test_declining_buyer_breaks_pay_iff_and_h_ownership(self, scenario_data):
        scenario_data["players"][1].update(strategy={"kind": "never_disclose"}, fmv="50")
        config = parse_scenario(scenario_data)
        events, summary = run(config)
        violations = check_desiderata(config, events, summary)
        assert [violation.split(":")[0] for violation in violations] == [
            "pay-iff",
            "H-ownership",
        ]

    def test_self_transfer_pays_nothing(self, scenario_data):
        scenario_data["players"][1]["strategy"] = {"kind": "self_transferer", "hops": 2}
        config = parse_scenario(scenario_data)
        events, summary = run(config)
        assert check_desiderata(config, events, summary) == []
        assert verify_equilibrium(config, allow_mixed=True, events=events, summary=summary).passed
