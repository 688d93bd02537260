"""Experiment orchestration: theorem bounds, scenarios, result files and the CLI."""

from .bounds import THEOREMS, krylov_dim, theorem_bound, theorem_probability
from .config import SCENARIOS, ExperimentConfig, load_config, parse_seeds
from .scenarios import COLUMNS, ScenarioResult, TrialRecord, range_report, run_scenario

__all__ = ["THEOREMS", "krylov_dim", "theorem_bound", "theorem_probability", "SCENARIOS",
           "ExperimentConfig", "load_config", "parse_seeds", "COLUMNS", "ScenarioResult",
           "TrialRecord", "range_report", "run_scenario"]
