"""
Unfolding Module - parameter choices that force small limit cycles.

For a lienard family affine in parameters entering f, B is an exact affine
function of the parameters. unfold() picks k + 1 consecutive odd indices
starting at the lowest one the parameters control and solves exactly for

    B_top = s * eps,  B_(top-2) = -s * eps * rho,  B_(top-4) = s * eps * rho^3, ...

so that the ratio between neighbouring rungs shrinks (rho, rho^2, ...) and
the signs alternate; every odd index below the ladder is forced to zero.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.errors import ConfigError, UnachievableLadder
from src.focal import B_coefficients, build_lienard, linear_B_map
from src.series import format_rational
from src.systems import SystemFamily

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-6
DEFAULT_RANK_THRESHOLD = 1e-8


def to_fraction(value) -> Fraction:
    """Exact value of an int, Fraction, 'p/q' string or decimal float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    try:
        return Fraction(str(value).strip())
    except ValueError as e:
        raise ConfigError(f"not a number: {value!r}") from e


@dataclass
class UnfoldingPlan:
    """Parameter values realising an alternating ladder of B values."""
    target_count: int
    eps: Fraction
    ratio: Fraction
    top_sign: int = -1
    ladder: List[int] = field(default_factory=list)
    targets: Dict[int, Fraction] = field(default_factory=dict)
    assignments: Dict[str, Fraction] = field(default_factory=dict)
    realized: Dict[int, Fraction] = field(default_factory=dict)
    jacobian_rank: Optional[int] = None
    singular_values: List[float] = field(default_factory=list)

    def is_valid(self) -> bool:
        """Alternating signs and |B_lower| <= ratio * |B_upper| on the realised values."""
        values = [self.realized.get(j, Fraction(0)) for j in self.ladder]
        if any(v == 0 for v in values):
            return not self.ladder
        for lower, upper in zip(values, values[1:]):
            if lower * upper >= 0 or abs(lower) > self.ratio * abs(upper):
                return False
        return True

    def to_dict(self) -> dict:
        return {
            'target_count': self.target_count,
            'eps': self.eps,
            'ratio': self.ratio,
            'top_sign': self.top_sign,
            'ladder': [f"B{j}" for j in self.ladder],
            'targets': {f"B{j}": v for j, v in self.targets.items()},
            'assignments': dict(self.assignments),
            'realized': {f"B{j}": v for j, v in self.realized.items()},
            'valid': self.is_valid(),
            'jacobian_rank': self.jacobian_rank,
            'singular_values': list(self.singular_values),
        }


def ladder_targets(ladder: Sequence[int], eps: Fraction, ratio: Fraction,
                   top_sign: int = -1) -> Dict[int, Fraction]:
    """Top rung s*eps; each lower rung flips sign and shrinks by ratio^t, t = 1, 2, ..."""
    targets = {}
    value = top_sign * eps
    for t, j in enumerate(reversed(ladder)):
        if t > 0:
            value = -value * ratio ** t
        targets[j] = value
    return targets


def solve_exact(rows: List[List[Fraction]], rhs: List[Fraction],
                fallback: List[Fraction]) -> Optional[List[Fraction]]:
    """
    Gaussian elimination over the rationals. Free unknowns keep their
    fallback values; None when the system is inconsistent.
    """
    m, p = len(rows), len(fallback)
    augmented = [list(row) + [b] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(p):
        pivot = next((i for i in range(r, m) if augmented[i][c] != 0), None)
        if pivot is None:
            continue
        augmented[r], augmented[pivot] = augmented[pivot], augmented[r]
        lead = augmented[r][c]
        augmented[r] = [v / lead for v in augmented[r]]
        for i in range(m):
            if i != r and augmented[i][c] != 0:
                factor = augmented[i][c]
                augmented[i] = [a - factor * b for a, b in zip(augmented[i], augmented[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break

    if any(all(v == 0 for v in row[:p]) and row[p] != 0 for row in augmented[r:]):
        return None

    solution = list(fallback)
    free = [c for c in range(p) if c not in pivots]
    for i, c in enumerate(pivots):
        row = augmented[i]
        solution[c] = row[p] - sum((row[f] * fallback[f] for f in free), Fraction(0))
    return solution


def realized_B(family: SystemFamily, assignments: Dict[str, Fraction],
               order: Optional[int] = None) -> List[Fraction]:
    """B_1..B_M recomputed through the exact focal pipeline."""
    g, f = family.instantiate(assignments, order=order).lienard_pair()
    data = build_lienard(g, f)
    return B_coefficients(data.F, data.alpha)


def jacobian_rank(family: SystemFamily, values: Dict[str, Fraction], indices: Sequence[int],
                  parameters: Sequence[str], step: float = DEFAULT_STEP,
                  threshold: float = DEFAULT_RANK_THRESHOLD,
                  order: Optional[int] = None) -> tuple:
    """
    Rank of d(B_i)/d(params) by central differences, singular values
    thresholded relative to the largest one.
    """
    h = to_fraction(step)
    columns = []
    for name in parameters:
        plus, minus = dict(values), dict(values)
        plus[name] = values[name] + h
        minus[name] = values[name] - h
        b_plus = realized_B(family, plus, order)
        b_minus = realized_B(family, minus, order)
        columns.append([float((b_plus[j - 1] - b_minus[j - 1]) / (2 * h)) for j in indices])

    if not columns or not indices:
        return 0, []
    jacobian = np.array(columns).T
    singular = np.linalg.svd(jacobian, compute_uv=False)
    if singular.size == 0 or singular[0] == 0:
        return 0, [float(s) for s in singular]
    rank = int(np.sum(singular > threshold * singular[0]))
    return rank, [float(s) for s in singular]


def unfold(family: SystemFamily, k: int, eps, ratio, top_sign: int = -1,
           parameters: Optional[Sequence[str]] = None, estimate_rank: bool = True,
           order: Optional[int] = None, step: float = DEFAULT_STEP,
           threshold: float = DEFAULT_RANK_THRESHOLD) -> UnfoldingPlan:
    """Solve for parameter values realising a k-cycle ladder."""
    eps, ratio = to_fraction(eps), to_fraction(ratio)
    if k < 0:
        raise ConfigError(f"k must be >= 0, got {k}")
    if not 0 < ratio < 1:
        raise ConfigError(f"ratio must lie in (0, 1), got {ratio}")
    if eps <= 0:
        raise ConfigError(f"eps must be positive, got {eps}")
    if top_sign not in (1, -1):
        raise ConfigError(f"top sign must be +1 or -1, got {top_sign}")

    plan = UnfoldingPlan(target_count=k, eps=eps, ratio=ratio, top_sign=top_sign)
    defaults = family.resolve()
    if k == 0:
        plan.assignments = dict(defaults)
        logger.info("k=0: empty unfolding plan")
        return plan

    parameters = list(family.parameter_names if parameters is None else parameters)
    offset, columns = linear_B_map(family, defaults, parameters, order=order)
    size = len(offset)

    controllable = [j for j in range(1, size + 1, 2) if any(columns[p][j - 1] != 0 for p in parameters)]
    if not controllable:
        raise UnachievableLadder("no odd-index B_j depends on the parameters")
    start = controllable[0]
    ladder = [start + 2 * t for t in range(k + 1)]
    if ladder[-1] > size:
        raise UnachievableLadder(f"ladder up to B{ladder[-1]} exceeds the series order (B1..B{size})")

    targets = ladder_targets(ladder, eps, ratio, top_sign)
    constrained = list(range(1, start, 2)) + ladder
    rows = [[columns[p][j - 1] for p in parameters] for j in constrained]
    rhs = [targets.get(j, Fraction(0)) - offset[j - 1] for j in constrained]

    solution = solve_exact(rows, rhs, [defaults[p] for p in parameters])
    if solution is None:
        raise UnachievableLadder(
            f"parameters {', '.join(parameters)} cannot realise B values {', '.join(f'B{j}' for j in constrained)}"
        )

    assignments = dict(defaults)
    assignments.update(zip(parameters, solution))
    B = realized_B(family, assignments, order)

    plan.ladder = ladder
    plan.targets = targets
    plan.assignments = assignments
    plan.realized = {j: B[j - 1] for j in constrained}
    if not plan.is_valid():
        raise UnachievableLadder("realised B values violate the ladder constraints")

    if estimate_rank:
        plan.jacobian_rank, plan.singular_values = jacobian_rank(
            family, assignments, ladder[:-1], parameters, step, threshold, order
        )

    logger.info(
        "Unfolding ladder: " + ", ".join(f"B{j}={format_rational(targets[j])}" for j in ladder)
    )
    return plan
