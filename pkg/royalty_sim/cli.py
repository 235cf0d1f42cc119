"""Command-line entry point: ``royalty-sim <command> [options]``.

Exit status is 0 on success, 1 when a verification or replay fails and 2 for
usage, scenario and configuration errors. Logs go to stderr; with ``--json``
stdout carries exactly one JSON document.
"""
import argparse
import json
import logging
import sys
from decimal import Decimal, InvalidOperation
from enum import IntEnum
from pathlib import Path
from typing import Any, Dict, List, Optional

import polars as pl
from pydantic import ValidationError

from royalty_sim.analysis.bounds import bounds_report
from royalty_sim.analysis.collusion import collusion_limit, find_feasible_collusion
from royalty_sim.config import get_config, setup_logging
from royalty_sim.errors import ReplayMismatchError, RoyaltySimError
from royalty_sim.functions import FeeSpec, PriceSpec
from royalty_sim.ledger.events import read_jsonl, write_jsonl
from royalty_sim.sim import engine
from royalty_sim.sim.batch import analyze_batch, run_batch
from royalty_sim.sim.equilibrium import verify_equilibrium
from royalty_sim.sim.generator import random_scenario
from royalty_sim.sim.replay import replay
from royalty_sim.sim.scenario import ScenarioConfig, load_scenario
from royalty_sim.sim.summary import SimulationSummary, write_summary_csv, write_summary_json

logger = logging.getLogger(__name__)


class ExitStatus(IntEnum):
    OK = 0
    VERIFICATION_FAILED = 1
    USAGE_ERROR = 2


def _decimal(value: str) -> Decimal:
    try:
        number = Decimal(value)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a decimal number: {value!r}")
    if not number.is_finite():
        raise argparse.ArgumentTypeError(f"not a finite number: {value!r}")
    return number


def _positive_decimal(value: str) -> Decimal:
    number = _decimal(value)
    if number <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {value!r}")
    return number


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}")
    if number <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {value!r}")
    return number


def _seed(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}")
    if not 0 <= number < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer: {value!r}")
    return number


def _emit(
    args: argparse.Namespace, payload: Dict[str, Any], table: Optional[pl.DataFrame]
) -> None:
    if args.json:
        print(json.dumps(payload, default=str, sort_keys=True))
    elif table is not None:
        with pl.Config():
            pl.Config.set_tbl_rows(-1)
            pl.Config.set_fmt_str_lengths(80)
            print(table)


def _pairs_frame(values: Dict[str, Any]) -> pl.DataFrame:
    return pl.DataFrame(
        {"metric": list(values), "value": ["" if v is None else str(v) for v in values.values()]}
    )


def _summary_payload(summary: SimulationSummary) -> Dict[str, Any]:
    return json.loads(summary.model_dump_json())


def _resolve_seed(args: argparse.Namespace, config: ScenarioConfig) -> int:
    if args.seed is not None:
        return args.seed
    default = get_config().default_seed
    return default if default is not None else config.seed


def cmd_run(args: argparse.Namespace) -> ExitStatus:
    config = load_scenario(args.scenario)
    events, summary = engine.run(config, seed=_resolve_seed(args, config))
    if args.out:
        write_jsonl(events, args.out)
        logger.info(f"Wrote {len(events)} events to {args.out}")
    if args.summary:
        json_path = write_summary_json(summary, args.summary)
        csv_path = write_summary_csv(summary, Path(json_path).with_suffix(".csv"))
        logger.info(f"Wrote summary to {json_path} and {csv_path}")
    _emit(args, _summary_payload(summary), summary.to_frame())
    return ExitStatus.OK


def cmd_verify_eq(args: argparse.Namespace) -> ExitStatus:
    config = load_scenario(args.scenario)
    report = verify_equilibrium(config, grid_steps=args.grid_steps, allow_mixed=args.allow_mixed)
    payload = json.loads(report.model_dump_json())
    payload["passed"] = report.passed
    if report.deviations:
        table = pl.DataFrame([record.model_dump() for record in report.deviations])
    else:
        table = _pairs_frame(
            {
                "checked": report.checked,
                "skipped": report.skipped,
                "desiderata_violations": len(report.desiderata_violations),
                "passed": report.passed,
            }
        )
    _emit(args, payload, table)
    for violation in report.desiderata_violations:
        logger.warning(violation)
    return ExitStatus.OK if report.passed else ExitStatus.VERIFICATION_FAILED


def cmd_collusion(args: argparse.Namespace) -> ExitStatus:
    fee, hodl, rate, lockup = (float(v) for v in (args.fee, args.hodl, args.rate, args.lockup))
    limit = collusion_limit(fee, hodl, rate, lockup=lockup, n=args.n)
    witness = find_feasible_collusion(fee, hodl, rate, lockup, args.n)
    values: Dict[str, Any] = {
        "lambda": limit.discount,
        "exact_ratio": limit.exact_ratio,
        "necessary_condition_holds": limit.necessary_condition_holds,
        "approx_tn_bound": limit.approx_tn_bound,
        "tn": lockup * args.n,
        "symmetric_feasible": limit.symmetric_feasible,
        "witness_bribe": witness[0] if witness else None,
        "witness_collateral": witness[1] if witness else None,
    }
    if limit.discount * args.n >= 1:
        values["reason"] = "lambda * N >= 1: no collateral covers the total bribe"
    elif witness is None:
        values["reason"] = "no symmetric bribe satisfies all three inequalities"
    _emit(args, values, _pairs_frame(values))
    return ExitStatus.OK


def cmd_bounds(args: argparse.Namespace) -> ExitStatus:
    fee = FeeSpec.model_validate_json(args.fee_spec)
    price = PriceSpec.model_validate_json(args.price_spec)
    disclosed = float(args.disclosed) if args.disclosed is not None else None
    report = bounds_report(args.price, fee, price, disclosed_x=disclosed)
    values = report.model_dump()
    values["verdict"] = report.verdict
    _emit(args, values, _pairs_frame(values))
    return ExitStatus.OK


def cmd_replay(args: argparse.Namespace) -> ExitStatus:
    config = load_scenario(args.scenario)
    events = read_jsonl(args.log)
    _, summary = replay(events, config)
    _emit(args, _summary_payload(summary), summary.to_frame())
    return ExitStatus.OK


def cmd_batch(args: argparse.Namespace) -> ExitStatus:
    configs: Dict[str, ScenarioConfig] = {}
    for path in args.scenario or []:
        configs[Path(path).stem] = load_scenario(path)
    if args.random:
        base = args.seed if args.seed is not None else (get_config().default_seed or 0)
        for offset in range(args.random):
            configs[f"random-{base + offset}"] = random_scenario(base + offset)
    workers = args.workers or get_config().workers
    batch = run_batch(configs, workers=workers, verify=args.verify)
    frame = batch.results_frame()
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        frame.write_csv(out)
        logger.info(f"Wrote batch results to {out}")
    payload = {"statistics": analyze_batch(frame), "scenarios": frame.to_dicts()}
    _emit(args, payload, frame)
    return ExitStatus.OK if batch.all_passed else ExitStatus.VERIFICATION_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--log-level", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="royalty-sim", description="Royalty mechanism simulator and analysis tools"
    )
    parser.add_argument("--json", action="store_true", help="Machine-readable output on stdout")
    parser.add_argument("--log-level", default=None, help="Overrides LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[common], help="Simulate a scenario")
    run.add_argument("--scenario", required=True, help="Scenario JSON file")
    run.add_argument("--seed", type=_seed, default=None, help="Defaults to ROYALTY_SIM_SEED")
    run.add_argument("--out", help="Write the event log (JSONL) here")
    run.add_argument("--summary", help="Write the summary JSON here, and CSV beside it")
    run.set_defaults(handler=cmd_run)

    verify = commands.add_parser(
        "verify-eq", parents=[common], help="Check disclosures against the grid oracle"
    )
    verify.add_argument("--scenario", required=True)
    verify.add_argument("--grid-steps", type=_positive_int, default=None)
    verify.add_argument(
        "--allow-mixed", action="store_true", help="Accept non-best-response players"
    )
    verify.set_defaults(handler=cmd_verify_eq)

    collusion = commands.add_parser(
        "collusion", parents=[common], help="Collusion limit and feasibility"
    )
    collusion.add_argument("--fee", type=_positive_decimal, required=True, help="phi(x_P)")
    collusion.add_argument("--hodl", type=_positive_decimal, required=True, help="v_P")
    collusion.add_argument("--rate", type=_positive_decimal, required=True, help="R per year")
    collusion.add_argument("--lockup", type=_positive_decimal, required=True, help="T in years")
    collusion.add_argument("--n", type=_positive_int, required=True, help="Number of colluders")
    collusion.set_defaults(handler=cmd_collusion)

    bounds = commands.add_parser(
        "bounds", parents=[common], help="FMV lower bound, avoidance cap, arbitrage profit"
    )
    bounds.add_argument("--price", type=_positive_decimal, required=True, help="Sale price c")
    bounds.add_argument("--fee-spec", required=True, help='e.g. {"kind":"linear","rho":0.05}')
    bounds.add_argument("--price-spec", default='{"kind":"identity"}')
    bounds.add_argument("--disclosed", type=_positive_decimal, default=None, help="Buyer's x")
    bounds.set_defaults(handler=cmd_bounds)

    replay_cmd = commands.add_parser(
        "replay", parents=[common], help="Re-apply an event log and compare"
    )
    replay_cmd.add_argument("--log", required=True)
    replay_cmd.add_argument("--scenario", required=True)
    replay_cmd.set_defaults(handler=cmd_replay)

    batch = commands.add_parser("batch", parents=[common], help="Run many scenarios concurrently")
    sources = batch.add_mutually_exclusive_group(required=True)
    sources.add_argument("--scenario", nargs="+")
    sources.add_argument("--random", type=_positive_int, help="Generate N random scenarios")
    batch.add_argument("--seed", type=_seed, default=None, help="First seed for --random")
    batch.add_argument("--workers", type=_positive_int, default=None)
    batch.add_argument("--verify", action="store_true")
    batch.add_argument("--out", help="Write the per-scenario CSV here")
    batch.set_defaults(handler=cmd_batch)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return ExitStatus.OK if e.code in (0, None) else ExitStatus.USAGE_ERROR
    setup_logging(args.log_level)

    try:
        return int(args.handler(args))
    except ReplayMismatchError as e:
        logger.error(str(e))
        return ExitStatus.VERIFICATION_FAILED
    except (RoyaltySimError, ValidationError, ValueError, ArithmeticError, OSError) as e:
        logger.error(str(e))
        return ExitStatus.USAGE_ERROR
    except Exception:
        logger.exception("Unexpected failure")
        return ExitStatus.USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
