"""
Report Module - experiment records and their emission as JSON, CSV and plot data.

JSON is written with sorted keys, rationals as "p/q" strings and floats at
round-trip precision, so identical runs give byte-identical files.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from src.errors import ConfigError
from src.series import format_rational

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv', 'plotdata', 'markdown')
FLOAT_FORMAT = '%.17g'


@dataclass
class CriterionResult:
    """Pass/fail of one acceptance check."""
    criterion: str
    description: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'criterion': self.criterion,
            'description': self.description,
            'passed': self.passed,
            'details': self.details,
        }


@dataclass
class ExperimentReport:
    """Everything one experiment or command produced."""
    experiment_id: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    focal: Dict[str, Any] = field(default_factory=dict)
    cycles: Dict[str, Any] = field(default_factory=dict)
    criteria: List[CriterionResult] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    trajectories: Dict[str, pd.DataFrame] = field(default_factory=dict)
    artifacts: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def add(self, criterion: str, description: str, passed: bool, **details) -> CriterionResult:
        result = CriterionResult(criterion, description, bool(passed), details)
        self.criteria.append(result)
        level = logging.INFO if result.passed else logging.WARNING
        logger.log(level, f"[{criterion}] {description}: {'PASS' if result.passed else 'FAIL'}")
        return result

    def to_dict(self) -> dict:
        return {
            'experiment': self.experiment_id,
            'inputs': self.inputs,
            'focal': self.focal,
            'cycles': self.cycles,
            'results': self.results,
            'criteria': [c.to_dict() for c in self.criteria],
            'passed': self.passed,
            'tables': sorted(self.tables),
            'artifacts': list(self.artifacts),
        }


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; Fractions become 'p/q', non-finite floats become null."""
    if hasattr(value, 'to_dict') and not isinstance(value, pd.DataFrame):
        return to_jsonable(value.to_dict())
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, pd.DataFrame):
        return to_jsonable(value.to_dict(orient='records'))
    if isinstance(value, Path):
        return value.as_posix()
    return value


def dumps(payload: Any) -> str:
    """Canonical JSON text."""
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2) + "\n"


def _write_text(path: Path, text: str) -> Path:
    try:
        path.write_text(text, encoding='utf-8')
    except OSError as e:
        raise ConfigError(f"cannot write {path}: {e}") from e
    return path


def _write_frame(path: Path, frame: pd.DataFrame) -> Path:
    try:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    except OSError as e:
        raise ConfigError(f"cannot write {path}: {e}") from e
    return path


def plot_frames(report: ExperimentReport) -> Dict[str, pd.DataFrame]:
    """
    Plot-ready tables: x0/d columns per sampled table, one bracket interval
    per cycle root, and t/x/y polylines per simulated orbit.
    """
    frames = {}
    for name, table in sorted(report.tables.items()):
        if {'x0', 'd'} <= set(table.columns):
            frames[name] = table[['x0', 'd']]

    for name, cycles in sorted(report.cycles.items()):
        if hasattr(cycles, 'to_frame'):
            frame = cycles.to_frame()
            frames[f"{name}_brackets"] = frame[['x_lo', 'x_hi', 'root', 'paired']]

    if report.trajectories:
        pieces = []
        for name, trajectory in sorted(report.trajectories.items()):
            piece = trajectory[['t', 'x', 'y']].copy()
            piece.insert(0, 'series', name)
            pieces.append(piece)
        frames['trajectories'] = pd.concat(pieces, ignore_index=True)
    return frames


def generate_summary(report: ExperimentReport) -> str:
    """Markdown summary of a report."""
    lines = [
        f"# Experiment: {report.experiment_id}",
        "",
        f"**Result:** {'PASS' if report.passed else 'FAIL'}",
        "",
    ]

    if report.inputs:
        lines.extend(["## Inputs", ""])
        for key, value in sorted(report.inputs.items()):
            lines.append(f"- {key}: {to_jsonable(value)}")
        lines.append("")

    if report.criteria:
        lines.extend([
            "## Criteria",
            "",
            "| Criterion | Check | Result |",
            "|-----------|-------|--------|",
        ])
        for c in report.criteria:
            lines.append(f"| {c.criterion} | {c.description} | {'PASS' if c.passed else 'FAIL'} |")
        lines.append("")

    for name, focal in sorted(report.focal.items()):
        data = to_jsonable(focal)
        lines.extend([
            f"## Focal values: {name}",
            "",
            f"- Stability: {data.get('stability')}",
            f"- First nonzero odd B index: {data.get('first_odd_nonzero')}",
            f"- Focus order: {data.get('focus_order')}",
            "",
        ])

    for name, cycles in sorted(report.cycles.items()):
        data = to_jsonable(cycles)
        lines.extend([
            f"## Limit cycles: {name}",
            "",
            f"- Count: {data.get('count')} ({data.get('confirmed')} paired)",
        ])
        for row in data.get('cycles', []):
            lines.append(f"  - x* = {row['root']:.10g}, partner {row['partner']}")
        lines.append("")

    return "\n".join(lines)


def emit_report(report: ExperimentReport, fmt: str, out_dir: str | Path) -> List[Path]:
    """Write the report in one format under out_dir; returns the written paths."""
    if fmt not in FORMATS:
        raise ConfigError(f"unknown report format '{fmt}' (choose from {', '.join(FORMATS)})")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"cannot create output directory {out_dir}: {e}") from e

    prefix = report.experiment_id.replace('.', '_')
    written: List[Path] = []

    if fmt == 'csv':
        for name, table in sorted(report.tables.items()):
            written.append(_write_frame(out_dir / f"{prefix}_{name}.csv", table))
        for name, cycles in sorted(report.cycles.items()):
            if hasattr(cycles, 'to_frame'):
                written.append(_write_frame(out_dir / f"{prefix}_{name}_cycles.csv", cycles.to_frame()))
        if report.criteria:
            criteria = pd.DataFrame(
                [{'criterion': c.criterion, 'description': c.description, 'passed': c.passed}
                 for c in report.criteria]
            )
            written.append(_write_frame(out_dir / f"{prefix}_criteria.csv", criteria))
    elif fmt == 'plotdata':
        for name, frame in plot_frames(report).items():
            written.append(_write_frame(out_dir / f"{prefix}_{name}_plotdata.csv", frame))
    elif fmt == 'markdown':
        written.append(_write_text(out_dir / f"{prefix}_summary.md", generate_summary(report)))
    else:
        written.append(_write_text(out_dir / f"{prefix}_report.json", dumps(report)))

    if fmt != 'json':
        report.artifacts = sorted(set(report.artifacts) | {p.name for p in written})
    for path in written:
        logger.info(f"Wrote {path}")
    return written


def emit_all(report: ExperimentReport, out_dir: str | Path,
             formats: Optional[List[str]] = None) -> List[Path]:
    """CSV and plot data first so the JSON lists them as artifacts."""
    formats = formats or ['csv', 'plotdata', 'markdown', 'json']
    ordered = sorted(formats, key=lambda f: f == 'json')
    written = []
    for fmt in ordered:
        written.extend(emit_report(report, fmt, out_dir))
    return written
