"""
Generalized trigonometric functions, their period and the first-return
derivative for odd n.
"""

import math

import numpy as np
import pytest

from src.poincare import cs_sn, energy_defect, first_return_derivative, measured_period, period_T


def test_period_of_circular_case_is_two_pi():
    assert period_T(1) == pytest.approx(2 * math.pi, rel=1e-14)


def test_period_of_quartic_oscillator():
    assert period_T(2) == pytest.approx(7.416298709205487, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_measured_period_matches_closed_form(n):
    assert measured_period(n) == pytest.approx(period_T(n), abs=1e-6)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_energy_is_conserved(n):
    t = np.linspace(0.0, 3.0 * period_T(n), 301)
    cs, sn = cs_sn(n, t)
    assert np.max(energy_defect(n, cs, sn)) <= 1e-10


def test_cs_sn_at_origin_and_quarter_period():
    assert cs_sn(2, 0.0) == (1.0, 0.0)
    cs, sn = cs_sn(1, math.pi / 2)
    assert cs == pytest.approx(0.0, abs=1e-10)
    assert sn == pytest.approx(-1.0, abs=1e-10)


def test_cs_sn_keeps_input_order():
    cs, sn = cs_sn(1, np.array([1.0, 0.5, 2.0]))
    assert cs == pytest.approx(np.cos([1.0, 0.5, 2.0]), abs=1e-10)
    assert sn == pytest.approx(-np.sin([1.0, 0.5, 2.0]), abs=1e-10)


def test_cs_sn_rejects_negative_times():
    with pytest.raises(ValueError):
        cs_sn(2, np.array([-1.0, 1.0]))
    with pytest.raises(ValueError):
        period_T(0)


def test_first_return_derivative_for_n3_unit_damping():
    expected = math.exp(-2 * math.pi / (3 * math.sqrt(11)))
    assert first_return_derivative(3, 1.0) == pytest.approx(expected)
    assert first_return_derivative(3, 1.0) == pytest.approx(0.5318, abs=1e-4)
    assert first_return_derivative(3, 0.0) == 1.0


def test_first_return_derivative_needs_monodromy():
    with pytest.raises(ValueError):
        first_return_derivative(3, 4.0)
