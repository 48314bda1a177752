"""
Alternating unfolding ladders: targets, exact solves and the realised
B values on the quintic Lienard family.
"""

from fractions import Fraction

import pytest

from src.bifurcation import UnfoldingPlan, jacobian_rank, ladder_targets, solve_exact, to_fraction, unfold
from src.errors import ConfigError, UnachievableLadder
from src.systems import load_family

from tests.conftest import SYSTEMS


@pytest.fixture
def b0zero_family():
    return load_family(SYSTEMS / "quintic_lienard_b0zero.pvf")


def test_ladder_targets_alternate_and_shrink():
    targets = ladder_targets([1, 3, 5], Fraction(1), Fraction(1, 20), top_sign=-1)
    assert targets == {5: -1, 3: Fraction(1, 20), 1: Fraction(-1, 8000)}


def test_to_fraction():
    assert to_fraction("1/20") == Fraction(1, 20)
    assert to_fraction(0.25) == Fraction(1, 4)
    assert to_fraction(1e-6) == Fraction(1, 1000000)
    with pytest.raises(ConfigError):
        to_fraction("one")


def test_solve_exact_keeps_free_unknowns_at_fallback():
    rows = [[Fraction(2), Fraction(0), Fraction(0)]]
    solution = solve_exact(rows, [Fraction(1)], [Fraction(0), Fraction(7), Fraction(9)])
    assert solution == [Fraction(1, 2), 7, 9]


def test_solve_exact_detects_inconsistency():
    rows = [[Fraction(1), Fraction(1)], [Fraction(2), Fraction(2)]]
    assert solve_exact(rows, [Fraction(1), Fraction(3)], [Fraction(0)] * 2) is None


def test_k_zero_is_an_empty_plan(quintic_family):
    plan = unfold(quintic_family, 0, "1", "1/20")
    assert plan.ladder == []
    assert plan.assignments == quintic_family.resolve()
    assert plan.is_valid()


def test_one_cycle_ladder_without_linear_damping(b0zero_family):
    plan = unfold(b0zero_family, 1, "1", "1/20", parameters=['b2', 'b4'], estimate_rank=False)
    assert plan.ladder == [3, 5]
    assert plan.assignments['b2'] == Fraction(-3, 40)
    assert plan.assignments['b4'] == Fraction(5, 2)
    assert plan.assignments['b6'] == 0
    assert plan.realized == {1: 0, 3: Fraction(1, 20), 5: -1}
    assert plan.is_valid()


def test_two_cycle_ladder_with_linear_damping(quintic_family):
    plan = unfold(quintic_family, 2, "1", "1/20", parameters=['b0', 'b2', 'b4'])
    assert plan.ladder == [1, 3, 5]
    assert plan.assignments['b0'] == Fraction(1, 16000)
    assert plan.assignments['b2'] == Fraction(-3, 40)
    assert plan.assignments['b4'] == Fraction(5, 2)
    assert plan.realized[1] == Fraction(-1, 8000)
    assert plan.jacobian_rank == 2
    assert len(plan.singular_values) == 2


def test_positive_top_sign_flips_every_rung(quintic_family):
    plan = unfold(quintic_family, 1, "1/2", "1/10", top_sign=1, parameters=['b0', 'b2'],
                  estimate_rank=False)
    assert plan.targets == {3: Fraction(1, 2), 1: Fraction(-1, 20)}
    assert plan.assignments['b2'] == Fraction(-3, 4)
    assert plan.assignments['b0'] == Fraction(1, 40)


def test_plan_serialises_with_B_names(quintic_family):
    payload = unfold(quintic_family, 1, "1", "1/20", parameters=['b0', 'b2'], estimate_rank=False).to_dict()
    assert payload['ladder'] == ['B1', 'B3']
    assert payload['valid'] is True
    assert payload['targets']['B3'] == -1


def test_ladder_beyond_controllable_parameters(b0zero_family):
    with pytest.raises(UnachievableLadder):
        unfold(b0zero_family, 3, "1", "1/20", parameters=['b2', 'b4'], estimate_rank=False)


def test_ladder_beyond_series_order(b0zero_family):
    b0zero_family.order = 8
    with pytest.raises(UnachievableLadder):
        unfold(b0zero_family, 3, "1", "1/20", estimate_rank=False)


@pytest.mark.parametrize("k,eps,ratio,sign", [
    (-1, "1", "1/20", -1),
    (1, "0", "1/20", -1),
    (1, "1", "1", -1),
    (1, "1", "1/20", 0),
])
def test_invalid_unfolding_arguments(quintic_family, k, eps, ratio, sign):
    with pytest.raises(ConfigError):
        unfold(quintic_family, k, eps, ratio, top_sign=sign)


def test_jacobian_rank_of_independent_parameters(quintic_family):
    values = quintic_family.resolve()
    rank, singular = jacobian_rank(quintic_family, values, [1, 3], ['b0', 'b2', 'b4'])
    assert rank == 2
    rank, _ = jacobian_rank(quintic_family, values, [1, 3], ['b4'])
    assert rank == 0


def test_is_valid_rejects_a_broken_ratio():
    plan = UnfoldingPlan(target_count=1, eps=Fraction(1), ratio=Fraction(1, 20),
                         ladder=[1, 3], realized={1: Fraction(1, 2), 3: Fraction(-1)})
    assert not plan.is_valid()
