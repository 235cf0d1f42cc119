import asyncio
import logging
import time
from enum import Enum
from typing import Any, Dict, Optional

import polars as pl

from royalty_sim.sim import engine
from royalty_sim.sim.equilibrium import DeviationReport, verify_equilibrium
from royalty_sim.sim.scenario import ScenarioConfig
from royalty_sim.sim.summary import SimulationSummary

logger = logging.getLogger(__name__)


class TaskStatus(Enum):
    """Status of a batch task."""
    PENDING = "pending"
    IN_PROGRESS = "in_progress"
    COMPLETED = "completed"
    FAILED = "failed"


class ScenarioTask:
    """One scenario of a batch, run on a worker thread."""

    def __init__(self, name: str, config: ScenarioConfig, verify: bool = False):
        self.name = name
        self.config = config
        self.verify = verify
        self.status = TaskStatus.PENDING
        self.summary: Optional[SimulationSummary] = None
        self.report: Optional[DeviationReport] = None
        self.error: Optional[str] = None
        self.start_time: Optional[float] = None
        self.end_time: Optional[float] = None

    def _run(self) -> SimulationSummary:
        events, summary = engine.run(self.config)
        if self.verify:
            # Check against this run's own log
            self.report = verify_equilibrium(
                self.config, allow_mixed=True, events=events, summary=summary
            )
        return summary

    async def execute(self, semaphore: asyncio.Semaphore) -> SimulationSummary:
        async with semaphore:
            try:
                logger.info(f"Starting scenario: {self.name}")
                self.status = TaskStatus.IN_PROGRESS
                self.start_time = time.time()
                # Engine is synchronous
                self.summary = await asyncio.to_thread(self._run)
                self.status = TaskStatus.COMPLETED
                self.end_time = time.time()
                elapsed = self.end_time - self.start_time
                logger.info(f"Completed scenario {self.name} in {elapsed:.2f}s")
                return self.summary
            except Exception as e:
                self.status = TaskStatus.FAILED
                self.error = str(e)
                self.end_time = time.time()
                logger.error(f"Scenario {self.name} failed: {e}", exc_info=True)
                raise

    def row(self) -> Dict[str, Any]:
        summary = self.summary
        return {
            "scenario": self.name,
            "status": self.status.value,
            "seed": self.config.seed,
            "events": sum(summary.event_counts.values()) if summary else None,
            "creator": self.config.token.creator,
            "royalties": float(summary.royalties) if summary else None,
            "escrow_outstanding": float(summary.escrow_outstanding) if summary else None,
            "final_owner_player": summary.final_owner_player if summary else None,
            "deviation_flags": len(summary.deviation_flags) if summary else None,
            "max_fee_shortfall": float(summary.max_fee_shortfall) if summary else None,
            "verified": self.report.passed if self.report else None,
            "error": self.error,
        }


class BatchWorkflow:
    """Runs many scenarios concurrently and tabulates their summaries."""

    def __init__(self, workers: int = 4, verify: bool = False):
        self.workers = max(1, workers)
        self.verify = verify
        self.tasks: Dict[str, ScenarioTask] = {}

    def add_scenario(self, name: str, config: ScenarioConfig) -> None:
        self.tasks[name] = ScenarioTask(name, config, verify=self.verify)
        logger.debug(f"Added scenario {name} to batch")

    async def execute(self) -> Dict[str, ScenarioTask]:
        # Limit concurrency
        semaphore = asyncio.Semaphore(self.workers)
        tasks = list(self.tasks.values())
        # Failed tasks come back as exceptions
        results = await asyncio.gather(
            *(task.execute(semaphore) for task in tasks), return_exceptions=True
        )
        failed = sum(1 for result in results if isinstance(result, Exception))
        logger.info(f"Batch finished: {len(tasks) - failed} completed, {failed} failed")
        return self.tasks

    def get_status(self) -> Dict[str, Dict[str, Any]]:
        return {
            name: {
                "status": task.status.value,
                "start_time": task.start_time,
                "end_time": task.end_time,
                "error": task.error,
            }
            for name, task in self.tasks.items()
        }

    def results_frame(self) -> pl.DataFrame:
        return pl.DataFrame([task.row() for task in self.tasks.values()])

    @property
    def all_passed(self) -> bool:
        return all(
            task.status == TaskStatus.COMPLETED and (task.report is None or task.report.passed)
            for task in self.tasks.values()
        )


def analyze_batch(df: pl.DataFrame) -> Dict[str, Any]:
    """Aggregate statistics over a batch results frame."""
    if df.height == 0:
        return {"message": "No data to analyze"}
    # Failed tasks carry no summary
    completed = df.filter(pl.col("status") == TaskStatus.COMPLETED.value)
    results: Dict[str, Any] = {
        "scenarios": df.height,
        "completed": completed.height,
        "failed": df.height - completed.height,
    }
    if completed.height:
        results["royalties"] = {
            "mean": float(completed["royalties"].mean()),
            "min": float(completed["royalties"].min()),
            "max": float(completed["royalties"].max()),
        }
        results["max_fee_shortfall"] = float(completed["max_fee_shortfall"].max())
        results["owners"] = (
            completed.group_by("final_owner_player")
            .agg(pl.count())
            .sort("final_owner_player")
            .to_dicts()
        )
        results["royalties_by_creator"] = {
            row["creator"]: row["royalties"]
            for row in completed.group_by("creator").agg(pl.col("royalties").sum()).to_dicts()
        }
    return results


def run_batch(
    configs: Dict[str, ScenarioConfig], workers: int = 4, verify: bool = False
) -> BatchWorkflow:
    batch = BatchWorkflow(workers=workers, verify=verify)
    for name, config in configs.items():
        batch.add_scenario(name, config)
    asyncio.run(batch.execute())
    return batch
