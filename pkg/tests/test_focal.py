"""
Exact focal values of Lienard systems: the B_j pipeline, the sign law,
the fbar cross-check and the affine parameter map used by unfoldings.
"""

import json
from fractions import Fraction

import numpy as np
import pytest

from src.bifurcation import ExperimentRunner, dumps
from src.errors import ConfigError, HypothesisViolation
from src.focal import (
    FocalAnalyzer,
    HypothesisCase,
    Stability,
    build_lienard,
    hypothesis_case,
    linear_B_map,
)
from src.focal.lienard import NODE_RANGE
from src.series import TruncatedSeries
from src.systems import parse_system


@pytest.fixture
def analyzer(config):
    return FocalAnalyzer(config)


def test_quintic_B_identity(analyzer, quintic_family):
    values = {'b0': Fraction(1, 3), 'b2': Fraction(-2, 7), 'b4': Fraction(5), 'b6': Fraction(-1, 11)}
    _, _, focal = analyzer.analyze(quintic_family.instantiate(values))
    for j in range(4):
        assert focal.B_index(2 * j + 1) * (2 * j + 1) == -2 * values[f"b{2 * j}"]
    assert all(focal.B_index(2 * j) == 0 for j in range(1, 10))


def test_quintic_alpha_is_reflection(quintic_family):
    g, f = quintic_family.instantiate({'b2': 1}).lienard_pair()
    data = build_lienard(g, f)
    assert data.alpha[1] == -1
    assert all(c == 0 for c in data.alpha.coeffs[2:])


def test_alpha_is_an_involution_preserving_G_for_even_g_terms():
    g = TruncatedSeries.from_terms({3: 1, 4: 1}, 10)
    data = build_lienard(g, TruncatedSeries.zero(9))
    assert data.alpha.coeffs[:3] == (0, -1, Fraction(-2, 5))
    assert data.G.compose(data.alpha) == data.G.truncate(data.alpha.order)
    assert data.alpha.compose(data.alpha) == TruncatedSeries.identity(data.alpha.order)


@pytest.mark.parametrize("seed", range(6))
def test_random_lienard_instances_keep_the_involution(config, seed):
    system = ExperimentRunner(config).random_lienard(np.random.default_rng(seed), 20)
    data = build_lienard(*system.lienard_pair())
    assert data.G.compose(data.alpha) == data.G.truncate(data.alpha.order)
    assert data.alpha.compose(data.alpha) == TruncatedSeries.identity(data.alpha.order)


def test_random_lienard_draws_even_g_terms(config):
    runner = ExperimentRunner(config)
    rng = np.random.default_rng(3)
    pairs = [runner.random_lienard(rng, 20).lienard_pair() for _ in range(24)]
    assert any(not g.is_odd() for g, _ in pairs)
    assert all(f.is_even() for _, f in pairs)


def test_b0_damping_report(analyzer, quintic_family):
    _, _, focal = analyzer.analyze(quintic_family.instantiate({'b0': '1/10'}))
    assert focal.B_index(1) == Fraction(-1, 5)
    assert focal.first_odd_nonzero == 1
    assert focal.stability is Stability.STABLE
    assert focal.focus_order is None
    assert NODE_RANGE in focal.diagnostics

    payload = json.loads(dumps(focal))
    assert payload['B'][:3] == ["-1/5", "0", "0"]
    assert payload['stability'] == "stable"


def test_n3_oracle_focal_values(analyzer, oracle_family):
    nilpotent, data, focal = analyzer.analyze(oracle_family.instantiate())
    assert nilpotent.monodromic
    assert focal.B_index(1) == 0
    assert focal.B_index(3) == Fraction(-2, 3)
    assert focal.first_odd_nonzero == 3
    assert focal.focus_order == 0
    assert focal.stability is Stability.STABLE
    assert focal.filippov is Stability.STABLE
    assert data.fbar_exact()[2] == 1


def test_unstable_sign(analyzer):
    system = parse_system("kind lienard\ng 5 1\nf 2 -1\n")
    _, _, focal = analyzer.analyze(system)
    assert focal.leading_B == Fraction(2, 3)
    assert focal.stability is Stability.UNSTABLE
    assert focal.filippov is Stability.UNSTABLE


def test_focus_order_counts_vanishing_rungs(analyzer, quintic_family):
    _, _, focal = analyzer.analyze(quintic_family.instantiate({'b4': -1}))
    assert focal.first_odd_nonzero == 5
    assert focal.focus_order == 1
    assert focal.stability is Stability.UNSTABLE


def test_odd_pair_is_symmetric_center(analyzer):
    _, _, focal = analyzer.analyze(parse_system("kind lienard\ng 3 1\nf 1 1\nf 3 2\n"))
    assert all(b == 0 for b in focal.B)
    assert focal.stability is Stability.CENTER_SYMMETRIC
    assert focal.is_center


def test_negative_leading_coefficient_is_rejected(analyzer):
    with pytest.raises(HypothesisViolation):
        analyzer.analyze(parse_system("kind lienard\ng 3 -1\nf 1 1\n"))


def test_general_systems_need_the_numerical_path(analyzer, kukles_family):
    with pytest.raises(ConfigError):
        analyzer.analyze(kukles_family.instantiate())


def test_irrational_scale_keeps_signs(analyzer):
    # G = x^4/2 gives s = 2^(1/4)
    nilpotent, data, focal = analyzer.analyze(parse_system("kind lienard\ng 3 2\nf 2 1\n"))
    assert not data.scale.is_unit
    assert data.fbar_exact() is None
    assert focal.B_index(3) == Fraction(-2, 3)
    assert focal.stability is Stability.STABLE


def test_lower_series_order_yields_fewer_coefficients(analyzer, quintic_family):
    _, _, low = analyzer.analyze(quintic_family.instantiate({'b2': 1}, order=20))
    _, _, high = analyzer.analyze(quintic_family.instantiate({'b2': 1}, order=40))
    assert low.order == len(low.B)
    assert len(low.B) < len(high.B)
    assert low.B == high.B[:len(low.B)]


# ── Hypothesis checks ────────────────────────────────────────────────────────

def test_hypothesis_cases(quintic_family, oracle_family):
    g, f = quintic_family.instantiate({'b2': 1}).lienard_pair()
    assert hypothesis_case(g, f, 2) is HypothesisCase.N2_FOCUS

    g, f = oracle_family.instantiate().lienard_pair()
    assert hypothesis_case(g, f, 3) is HypothesisCase.SYMMETRIC

    g, f = quintic_family.instantiate({'b0': '1/10'}).lienard_pair()
    assert hypothesis_case(g, f, 2) is HypothesisCase.NONE


# ── Parameter map ────────────────────────────────────────────────────────────

def test_linear_B_map_of_quintic(quintic_family):
    offset, columns = linear_B_map(quintic_family)
    assert all(b == 0 for b in offset)
    assert columns['b0'][0] == -2
    assert columns['b2'][2] == Fraction(-2, 3)
    assert columns['b4'][4] == Fraction(-2, 5)
    assert columns['b6'][6] == Fraction(-2, 7)
    assert columns['b2'][0] == 0


def test_linear_B_map_reproduces_direct_values(analyzer, quintic_family):
    values = {'b0': Fraction(1, 8), 'b2': Fraction(-3, 4), 'b4': Fraction(2), 'b6': Fraction(0)}
    offset, columns = linear_B_map(quintic_family, values)
    _, _, focal = analyzer.analyze(quintic_family.instantiate(values))
    for j in range(1, 9):
        predicted = offset[j - 1] + sum(values[p] * columns[p][j - 1] for p in columns)
        assert predicted == focal.B_index(j)


def test_linear_B_map_needs_lienard_kind(kukles_family):
    with pytest.raises(ConfigError):
        linear_B_map(kukles_family)
