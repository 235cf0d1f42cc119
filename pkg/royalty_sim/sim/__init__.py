"""Scenario-driven simulation: engine, equilibrium checks, replay and batches."""
from royalty_sim.sim.scenario import (
    MechanismConfig,
    PlayerConfig,
    ScenarioConfig,
    ScriptedIntent,
    TokenConfig,
    load_scenario,
    parse_scenario,
)
from royalty_sim.sim.summary import (
    SimulationSummary,
    build_summary,
    write_summary_csv,
    write_summary_json,
)
from royalty_sim.sim.engine import SimPhase, SimulationEngine, run
from royalty_sim.sim.equilibrium import DeviationReport, check_desiderata, verify_equilibrium
from royalty_sim.sim.replay import replay
from royalty_sim.sim.generator import random_scenario
from royalty_sim.sim.batch import BatchWorkflow, TaskStatus, analyze_batch, run_batch
