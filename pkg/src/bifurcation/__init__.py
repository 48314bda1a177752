"""Unfolding ladders, committed experiments and report emission."""

from .unfolding import UnfoldingPlan, unfold, jacobian_rank, ladder_targets, solve_exact, realized_B, to_fraction
from .reporting import CriterionResult, ExperimentReport, emit_report, emit_all, generate_summary, dumps, to_jsonable
from .experiments import EXPERIMENTS, ALIASES, ExperimentRunner, canonical_id, run_experiment, read_yaml, merge_config
