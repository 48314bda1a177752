"""
Planar systems: section curve, (g, f) extraction and the monodromy
classification of the nilpotent origin.
"""

from fractions import Fraction

import pytest

from src.errors import DegenerateLine, HypothesisViolation, NotOddLeadingPower
from src.series import TruncatedSeries
from src.systems import (
    classify_nilpotent,
    extract_fg,
    load_family,
    parse_system,
    section_curve,
    truncate_degree,
)

from tests.conftest import SYSTEMS


def test_section_curve_of_x_squared_plus_xy():
    system = parse_system("kind general\norder 12\nX 2 0 1\nX 1 1 1\nY 3 0 -1\n")
    F = section_curve(system)
    assert [F[k] for k in range(6)] == [0, 0, -1, 1, -1, 1]
    residual = F + system.X.substitute_y(F)
    assert residual.is_zero()


def test_section_curve_is_zero_without_X(kukles_family):
    assert section_curve(kukles_family.instantiate()).is_zero()


def test_kukles_extraction(kukles_family):
    g, f = extract_fg(kukles_family.instantiate())
    assert g[3] == 1
    assert g.degree() == 3
    assert f[1] == 1
    assert f[2] == Fraction(1, 4)
    assert f.degree() == 2


def test_kukles_classification(kukles_family):
    nilpotent = classify_nilpotent(*extract_fg(kukles_family.instantiate()))
    assert nilpotent.n == 2
    assert nilpotent.a == -1
    assert nilpotent.b == -1
    assert nilpotent.discriminant == -7
    assert nilpotent.monodromic
    assert nilpotent.p_n == 1
    assert nilpotent.nilpotent


def test_kukles_strong_damping_is_not_monodromic(kukles_family):
    nilpotent = classify_nilpotent(*extract_fg(kukles_family.instantiate({'a11': 3})))
    assert nilpotent.b == -3
    assert not nilpotent.monodromic


@pytest.mark.parametrize("A,monodromic", [
    ("0", True), ("1", True), ("7/5", True), ("3/2", False), ("2", False),
])
def test_cubic_focus_monodromy_threshold(A, monodromic):
    family = load_family(SYSTEMS / "cubic_focus.pvf")
    nilpotent = classify_nilpotent(*extract_fg(family.instantiate({'A': A})))
    assert nilpotent.n == 2
    assert nilpotent.a == -1
    assert nilpotent.b == 2 * Fraction(A)
    assert nilpotent.monodromic is monodromic


def test_truncation_keeps_the_classification(kukles_family):
    system = kukles_family.instantiate()
    full = classify_nilpotent(*extract_fg(system))
    truncated = truncate_degree(system, 3)
    assert classify_nilpotent(*extract_fg(truncated)) == full
    assert truncated.metadata['truncated_degree'] == 3


def test_truncate_degree_drops_high_monomials(kukles_family):
    truncated = truncate_degree(kukles_family.instantiate(), 2)
    assert truncated.Y.degree() == 2
    assert truncated.Y.coefficient(3, 0) == 0
    with pytest.raises(ValueError):
        truncate_degree(kukles_family.instantiate(), 1)


def test_n3_oracle_classification(oracle_family):
    nilpotent = classify_nilpotent(*extract_fg(oracle_family.instantiate()))
    assert (nilpotent.n, nilpotent.a, nilpotent.b) == (3, -1, -1)
    assert nilpotent.discriminant == -11
    assert nilpotent.p_n == 0


def test_even_leading_power_is_rejected():
    system = parse_system("kind lienard\ng 2 1\ng 3 1\n")
    with pytest.raises(NotOddLeadingPower):
        classify_nilpotent(*extract_fg(system))


def test_linear_leading_term_is_not_nilpotent():
    g = TruncatedSeries.monomial(1, 1, 10)
    with pytest.raises(HypothesisViolation):
        classify_nilpotent(g, TruncatedSeries.zero(9))


def test_vanishing_g_is_degenerate():
    with pytest.raises(DegenerateLine):
        classify_nilpotent(TruncatedSeries.zero(10), TruncatedSeries.zero(9))


def test_linear_damping_marks_node_regime():
    nilpotent = classify_nilpotent(*extract_fg(parse_system("kind lienard\ng 3 1\nf 0 1/10\n")))
    assert nilpotent.linear_trace == Fraction(-1, 10)
    assert not nilpotent.nilpotent


def test_with_order_changes_only_the_series_order(kukles_family):
    system = kukles_family.instantiate()
    raised = system.with_order(80)
    assert raised.series_order == 80
    assert raised.Y.terms == system.Y.terms
