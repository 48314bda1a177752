"""
Report records and their emission: canonical JSON, CSV tables, plot data
and the markdown summary.
"""

import json
import math
from fractions import Fraction

import numpy as np
import pandas as pd
import pytest

from src.bifurcation import ExperimentReport, dumps, emit_all, emit_report, generate_summary, to_jsonable
from src.errors import ConfigError


@pytest.fixture
def report():
    report = ExperimentReport('demo.run', inputs={'system': 'quintic-lienard', 'eps': Fraction(1, 20)})
    report.tables['grid'] = pd.DataFrame({'x0': [0.01, 0.02], 'P': [0.0099, 0.0201], 'd': [-1e-4, 1e-4]})
    report.results['ratio'] = Fraction(-3, 40)
    report.add('b-identity', "exact identity", True)
    report.add('cycle-production', "at least one cycle", False, count=0)
    return report


# ── JSON ─────────────────────────────────────────────────────────────────────

def test_to_jsonable_converts_rationals_and_non_finite_floats():
    payload = to_jsonable({'a': Fraction(-3, 40), 'b': math.inf, 'c': np.float64(0.5), 'd': (1, 2)})
    assert payload == {'a': '-3/40', 'b': None, 'c': 0.5, 'd': [1, 2]}


def test_dumps_is_canonical(report):
    text = dumps(report)
    assert text.endswith("\n")
    assert text == dumps(report)
    data = json.loads(text)
    assert list(data) == sorted(data)
    assert data['results']['ratio'] == '-3/40'
    assert data['inputs']['eps'] == '1/20'
    assert data['passed'] is False
    assert [c['criterion'] for c in data['criteria']] == ['b-identity', 'cycle-production']


def test_report_passes_only_when_every_criterion_passes():
    report = ExperimentReport('ok')
    assert report.passed
    report.add('determinism', "same bytes", True)
    assert report.passed
    report.add('determinism', "same bytes again", False)
    assert not report.passed


# ── Files ────────────────────────────────────────────────────────────────────

def test_emit_csv(report, tmp_path):
    written = emit_report(report, 'csv', tmp_path)
    assert sorted(p.name for p in written) == ['demo_run_criteria.csv', 'demo_run_grid.csv']
    assert (tmp_path / 'demo_run_grid.csv').read_text().splitlines()[0] == "x0,P,d"
    assert 'demo_run_grid.csv' in report.artifacts


def test_emit_plotdata(report, tmp_path):
    written = emit_report(report, 'plotdata', tmp_path)
    assert [p.name for p in written] == ['demo_run_grid_plotdata.csv']
    assert written[0].read_text().splitlines()[0] == "x0,d"


def test_emit_markdown(report, tmp_path):
    written = emit_report(report, 'markdown', tmp_path / "nested")
    assert [p.name for p in written] == ['demo_run_summary.md']
    assert "| b-identity | exact identity | PASS |" in written[0].read_text()


def test_unknown_format(report, tmp_path):
    with pytest.raises(ConfigError):
        emit_report(report, 'xml', tmp_path)


def test_emit_all_writes_json_last(report, tmp_path):
    written = emit_all(report, tmp_path)
    assert written[-1].name == 'demo_run_report.json'
    data = json.loads(written[-1].read_text())
    assert 'demo_run_summary.md' in data['artifacts']
    assert 'demo_run_grid_plotdata.csv' in data['artifacts']


def test_emit_twice_is_byte_identical(report, tmp_path):
    first = emit_all(report, tmp_path / "a", ['csv', 'json'])
    second = emit_all(report, tmp_path / "b", ['csv', 'json'])
    for a, b in zip(first, second):
        assert a.name == b.name
        assert a.read_bytes() == b.read_bytes()


# ── Summary ──────────────────────────────────────────────────────────────────

def test_summary_lists_result_and_inputs(report):
    summary = generate_summary(report)
    assert summary.startswith("# Experiment: demo.run")
    assert "**Result:** FAIL" in summary
    assert "- eps: 1/20" in summary
    assert "| cycle-production | at least one cycle | FAIL |" in summary
