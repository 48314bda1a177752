"""
Polar clock integration and the sampled return map: centers, stable and
unstable foci, the half-turn partner and table bookkeeping.
"""

import math

import numpy as np
import pandas as pd
import pytest

from src.errors import DenominatorNearZero
from src.systems import parse_system
from src.poincare import (
    NEGATIVE,
    POSITIVE,
    PolarField,
    ReturnMapSampler,
    ReturnMapTable,
    geometric_grid,
    half_turn,
    integrate_r,
    inverse_return_map,
    return_map,
)


@pytest.fixture
def center_field(config, kukles_center_family):
    return PolarField.from_system(kukles_center_family.instantiate(), config, r_max=0.25)


def damped_field(config, family, b0):
    return PolarField.from_system(family.instantiate({'b0': b0}), config, r_max=0.25)


def test_field_reads_n_from_the_classification(center_field, oracle_family, config):
    assert center_field.n == 2
    assert PolarField.from_system(oracle_family.instantiate(), config, r_max=0.1).n == 3


def test_center_has_zero_displacement(center_field):
    for x0 in (0.02, 0.05, 0.1, 0.2):
        _, d = return_map(center_field, x0)
        assert abs(d) <= 1e-9


def test_center_half_turn_is_mirror_point(center_field):
    assert half_turn(center_field, 0.1) == pytest.approx(-0.1, abs=1e-10)


def test_negative_side_of_center(center_field):
    P, d = return_map(center_field, -0.1)
    assert P == pytest.approx(-0.1, abs=1e-10)


def test_stable_damping_contracts(config, quintic_family):
    field = damped_field(config, quintic_family, '1/1000')
    P, d = return_map(field, 0.1)
    assert d < 0
    assert 0 < P < 0.1


def test_unstable_damping_expands(config, quintic_family):
    field = damped_field(config, quintic_family, '-1/1000')
    _, d = return_map(field, 0.1)
    assert d > 0


def test_inverse_return_map(config, quintic_family):
    field = damped_field(config, quintic_family, '1/1000')
    P, _ = return_map(field, 0.1)
    assert inverse_return_map(field, P) == pytest.approx(0.1, abs=1e-10)
    assert inverse_return_map(field, 0.0) == 0.0


def test_negative_side_is_inverse_of_backward_turn(config, quintic_family):
    field = damped_field(config, quintic_family, '1/1000')
    assert field.n % 2 == 0
    for x0 in (-0.05, -0.1):
        P, _ = return_map(field, x0)
        assert inverse_return_map(field, x0) == pytest.approx(P, abs=1e-10)


def test_integrate_r_respects_validity_radius(center_field):
    with pytest.raises(ValueError):
        integrate_r(center_field, 0.0, -math.pi, 0.3)
    assert integrate_r(center_field, 0.0, -math.pi, 0.0) == 0.0
    assert return_map(center_field, 0.0) == (0.0, 0.0)


def test_stats_accumulate(center_field):
    return_map(center_field, 0.05)
    assert center_field.stats.integrations == 1
    assert center_field.stats.evaluations > 0
    assert center_field.stats.min_denominator_ratio > center_field.eps_den


def test_denominator_guard(config, kukles_center_family):
    config['integrator']['eps_den'] = 1e3
    field = PolarField.from_system(kukles_center_family.instantiate(), config, r_max=0.25)
    with pytest.raises(DenominatorNearZero):
        return_map(field, 0.05)


def test_section_order_is_raised_for_large_radius(config):
    system = parse_system("kind general\norder 10\nX 2 0 1\nX 1 1 1\nY 3 0 -1\n")
    field = PolarField.from_system(system, config, r_max=0.3)
    assert field.F_section.order > 10


# ── Sampling ─────────────────────────────────────────────────────────────────

def test_geometric_grid():
    grid = geometric_grid(1e-3, 1e-1, 3)
    assert grid == pytest.approx([1e-3, 1e-2, 1e-1])
    with pytest.raises(ValueError):
        geometric_grid(0.1, 0.01, 5)


def test_sampler_builds_monotone_table(config, center_field):
    table = ReturnMapSampler(config).sample(center_field, POSITIVE, np.geomspace(0.02, 0.2, 6))
    assert len(table) == 6
    assert list(table.samples.columns) == ['x0', 'P', 'd']
    assert np.all(np.diff(table.x0) > 0)
    assert table.failures == []
    assert table.to_dict()['max_abs_d'] <= 1e-9


def test_sampler_negative_side(config, center_field):
    table = ReturnMapSampler(config).sample(center_field, NEGATIVE, np.geomspace(0.02, 0.2, 4))
    assert np.all(table.x0 < 0)
    assert table.direction == NEGATIVE


def test_sampler_records_failures(config, kukles_center_family):
    config['integrator']['eps_den'] = 1e3
    field = PolarField.from_system(kukles_center_family.instantiate(), config, r_max=0.25)
    table = ReturnMapSampler(config).sample(field, POSITIVE, [0.05, 0.1])
    assert len(table) == 0
    assert table.failures == [0.05, 0.1]


def test_table_rejects_non_monotone_x0():
    with pytest.raises(ValueError):
        ReturnMapTable(pd.DataFrame({'x0': [0.1, 0.3, 0.2], 'P': [0.0] * 3, 'd': [0.0] * 3}))


def test_table_csv_header(config, center_field, tmp_path):
    table = ReturnMapSampler(config).sample(center_field, POSITIVE, [0.05, 0.1])
    path = tmp_path / "table.csv"
    table.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x0,P,d"
    assert len(lines) == 3
