"""
Command line entry points, config helpers and the committed experiments.
"""

import json

import pytest

import main
from src.bifurcation import ExperimentRunner, canonical_id, merge_config, read_yaml, run_experiment
from src.errors import ConfigError

from tests.conftest import ROOT, SYSTEMS

CONFIG = str(ROOT / "config.yaml")


def run_cli(tmp_path, *args):
    return main.main(['--config', CONFIG, '--out', str(tmp_path), '--quiet', *args])


def read_report(tmp_path, name):
    return json.loads((tmp_path / f"{name}_report.json").read_text())


# ── Config helpers ───────────────────────────────────────────────────────────

def test_read_yaml(tmp_path):
    good = tmp_path / "good.yaml"
    good.write_text("k: 2\neps: '1/2'\n")
    assert read_yaml(good) == {'k': 2, 'eps': '1/2'}

    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    assert read_yaml(empty) == {}


@pytest.mark.parametrize("text", ["k: [1, 2\n", "- just\n- a list\n"])
def test_read_yaml_rejects_bad_documents(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text)
    with pytest.raises(ConfigError):
        read_yaml(path)


def test_read_yaml_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        read_yaml(tmp_path / "absent.yaml")


def test_merge_config_is_recursive():
    base = {'cycles': {'grid': 40, 'r_max': 0.2}, 'seed': 1}
    merged = merge_config(base, {'cycles': {'grid': 12}, 'extra': True})
    assert merged == {'cycles': {'grid': 12, 'r_max': 0.2}, 'seed': 1, 'extra': True}
    assert base['cycles']['grid'] == 40


def test_parse_assignments():
    assert main.parse_assignments(['b0 = 1/2', 'b2=-3']) == {'b0': '1/2', 'b2': '-3'}
    assert main.parse_assignments(None) == {}
    with pytest.raises(ConfigError):
        main.parse_assignments(['b0'])


def test_unknown_experiment(config):
    with pytest.raises(ConfigError):
        run_experiment('no-such-experiment', config)


def test_missing_system_file(config):
    with pytest.raises(ConfigError):
        ExperimentRunner(config).family('absent.pvf')


# ── Commands ─────────────────────────────────────────────────────────────────

def test_classify_writes_a_report(tmp_path):
    assert run_cli(tmp_path, 'classify', str(SYSTEMS / "kukles.pvf")) == main.EXIT_OK
    data = read_report(tmp_path, 'classify')
    assert data['experiment'] == 'classify'
    assert data['results']['classification']['n'] == 2
    assert data['results']['classification']['monodromic'] is True
    assert (tmp_path / "classify_summary.md").exists()


def test_focal_with_parameter_override(tmp_path):
    path = str(SYSTEMS / "quintic_lienard.pvf")
    assert run_cli(tmp_path, '--order', '20', 'focal', path, '--set', 'b0=1/10') == main.EXIT_OK
    focal = read_report(tmp_path, 'focal')['focal']['system']
    assert focal['B'][0] == '-1/5'
    assert focal['stability'] == 'stable'


def test_unfold_command(tmp_path):
    path = str(SYSTEMS / "quintic_lienard_b0zero.pvf")
    assert run_cli(tmp_path, 'unfold', path, '--k', '1', '--params', 'b2,b4') == main.EXIT_OK
    plan = read_report(tmp_path, 'unfold')['results']['plan']
    assert plan['assignments']['b2'] == '-3/40'
    assert plan['assignments']['b4'] == '5/2'
    assert plan['valid'] is True


def test_sweep_command(tmp_path):
    path = str(SYSTEMS / "quintic_lienard.pvf")
    assert run_cli(tmp_path, '--order', '20', 'sweep', path, '--param', 'b0', '--values', '1/10,0,-1/10') == 0
    lines = (tmp_path / "sweep_sweep.csv").read_text().splitlines()
    assert len(lines) == 4


def test_missing_system_exits_with_input_error(tmp_path):
    assert run_cli(tmp_path, 'classify', str(tmp_path / "absent.pvf")) == main.EXIT_INPUT_ERROR


def test_malformed_system_exits_with_input_error(tmp_path):
    path = tmp_path / "broken.pvf"
    path.write_text("kind general\nY 3 0\n")
    assert run_cli(tmp_path, 'classify', str(path)) == main.EXIT_INPUT_ERROR


def test_unknown_parameter_exits_with_input_error(tmp_path):
    path = str(SYSTEMS / "kukles.pvf")
    assert run_cli(tmp_path, 'classify', path, '--set', 'zz=1') == main.EXIT_INPUT_ERROR


def test_explicit_missing_config_exits_with_input_error(tmp_path):
    code = main.main(['--config', str(tmp_path / "absent.yaml"), '--out', str(tmp_path),
                      'classify', str(SYSTEMS / "kukles.pvf")])
    assert code == main.EXIT_INPUT_ERROR


def test_no_command_prints_help(capsys):
    assert main.main([]) == main.EXIT_OK
    assert 'nilcycle' in capsys.readouterr().out


# ── Experiments ──────────────────────────────────────────────────────────────

def test_cubic_focus_monodromy_criterion(config):
    report = ExperimentRunner(config).run('cubic-focus', {'focus_points': 1, 'samples': 10})
    criterion = next(c for c in report.criteria if c.criterion == 'monodromy-criterion')
    assert criterion.passed


def test_experiment_ids_resolve_aliases():
    assert canonical_id('prop4.2') == 'prop4.2'
    assert canonical_id('cubic-focus') == 'prop4.2'
    assert canonical_id('kukles') == 'prop4.1'
    assert canonical_id('cycle-production') == 'prop4.3'
    assert canonical_id('symmetry') == 'symmetry'
    with pytest.raises(ConfigError):
        canonical_id('prop4.9')


def test_numbered_experiment_id(config):
    report = ExperimentRunner(config).run('prop4.2', {'focus_points': 1, 'samples': 10})
    assert report.experiment_id == 'prop4.2'
    assert any(c.criterion == 'focus-persistence' for c in report.criteria)


def test_symmetry_experiment_on_a_small_grid(config):
    report = ExperimentRunner(config).run('symmetry', {'samples': 3})
    assert {c.criterion for c in report.criteria} == {'polar-symmetry'}
    assert len(report.criteria) == 5
    assert report.passed
    assert report.results['n2']['negative_side'] <= 1e-8
    assert 'negative_side' not in report.results['n3']


def test_truncation_experiment(config):
    report = ExperimentRunner(config).run('truncation')
    assert [c.criterion for c in report.criteria] == ['truncation']
    assert report.passed
    assert [row['j'] for row in report.results['comparison']] == [1, 2, 3, 4]


@pytest.mark.slow
def test_kukles_experiment_on_a_small_grid(config):
    report = ExperimentRunner(config).run('prop4.1', {'center_points': 2, 'samples': 10})
    assert report.experiment_id == 'prop4.1'
    assert [c.criterion for c in report.criteria] == ['kukles-center'] + ['kukles-perturbation'] * 3
    assert report.passed


@pytest.mark.slow
def test_cycle_production_experiment(tmp_path, monkeypatch):
    monkeypatch.chdir(ROOT)
    assert run_cli(tmp_path, 'experiment', 'cycle-production') == main.EXIT_OK
    data = read_report(tmp_path, 'prop4_3')
    assert data['passed'] is True
    assert {c['criterion'] for c in data['criteria']} == {'b-identity', 'cycle-production'}


@pytest.mark.slow
def test_selftest_passes_and_is_deterministic(tmp_path, monkeypatch):
    monkeypatch.chdir(ROOT)
    assert run_cli(tmp_path / "a", 'selftest') == main.EXIT_OK
    assert run_cli(tmp_path / "b", 'selftest') == main.EXIT_OK
    first = (tmp_path / "a" / "selftest_report.json").read_bytes()
    assert first == (tmp_path / "b" / "selftest_report.json").read_bytes()
