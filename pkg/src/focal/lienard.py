"""
Lienard Focal Module - exact focal coefficients for x' = y, y' = -g(x) - y f(x).

Pipeline:
    F = int f, G = int g
    u = [2n G]^(1/2n) = s * w(x),  s = a^(1/2n), w = x + O(x^2)
    alpha = w^-1(-w(x))            (G(alpha) = G)
    B_j   = coefficients of F(alpha(x)) - F(x)

The canonical damping fbar(z) = z^(2n-1) f(u^-1 z) / g(u^-1 z) is stored as
phi(z) = z^(2n-1) f(w^-1 z) / g(w^-1 z), so fbar_j = phi_j * s^(2n-1-j);
s > 0, hence every sign read off phi is the sign of fbar.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from src.errors import ConfigError, HypothesisViolation, NotOddLeadingPower, DegenerateLine
from src.series import ScaleTag, TruncatedSeries

logger = logging.getLogger(__name__)


class Stability(Enum):
    """Verdict on the origin."""
    STABLE = "stable"
    UNSTABLE = "unstable"
    UNDETERMINED = "undetermined"
    CENTER_CANDIDATE = "center-candidate"
    CENTER_SYMMETRIC = "center (symmetric)"


class HypothesisCase(Enum):
    """Which structural hypothesis on (g, f) holds for cycle bifurcation."""
    N2_FOCUS = "n2-focus"       # n = 2, f(0) = 0, f_1^2 - 8 g_3 < 0
    SYMMETRIC = "symmetric"     # g odd, f even, f = O(x^(n-1)), f_(n-1)^2 - 4n g_(2n-1) < 0
    NONE = "none"


NODE_RANGE = 'node-range'


@dataclass(frozen=True)
class LienardData:
    """Every intermediate series of the exact pipeline."""
    f: TruncatedSeries
    g: TruncatedSeries
    n: int
    a_lead: Fraction
    F: TruncatedSeries
    G: TruncatedSeries
    u: TruncatedSeries
    w: TruncatedSeries
    alpha: TruncatedSeries
    phi: TruncatedSeries
    scale: ScaleTag

    @property
    def l(self) -> int:
        return self.n // 2

    @property
    def p_n(self) -> int:
        return 1 if self.n % 2 == 0 else 0

    def fbar_exact(self) -> Optional[TruncatedSeries]:
        """fbar with rational coefficients, or None when s is irrational."""
        normalized = TruncatedSeries.from_coeffs([0, 1], 1, self.scale).normalized()
        if not normalized.scale.is_unit:
            return None
        s = normalized[1]
        top = 2 * self.n - 1
        return TruncatedSeries.from_coeffs(
            [c * s ** (top - j) for j, c in enumerate(self.phi.coeffs)], self.phi.order
        )


@dataclass
class FocalReport:
    """Result of focal_B on one parameter point."""
    n: int
    p_n: int
    B: List[Fraction]
    first_odd_nonzero: Optional[int]
    focus_order: Optional[int]
    stability: Stability
    hypothesis_case: HypothesisCase = HypothesisCase.NONE
    order: int = 0
    filippov: Stability = Stability.UNDETERMINED
    diagnostics: List[str] = field(default_factory=list)

    @property
    def is_center(self) -> bool:
        return self.stability in (Stability.CENTER_CANDIDATE, Stability.CENTER_SYMMETRIC)

    @property
    def leading_B(self) -> Optional[Fraction]:
        if self.first_odd_nonzero is None:
            return None
        return self.B[self.first_odd_nonzero - 1]

    def B_index(self, j: int) -> Fraction:
        """B_j with 1-based index; zero beyond the computed range."""
        if 1 <= j <= len(self.B):
            return self.B[j - 1]
        return Fraction(0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'p_n': self.p_n,
            'B': list(self.B),
            'first_odd_nonzero': self.first_odd_nonzero,
            'focus_order': self.focus_order,
            'stability': self.stability.value,
            'hypothesis_case': self.hypothesis_case.value,
            'order': self.order,
            'filippov': self.filippov.value,
            'diagnostics': list(self.diagnostics),
        }


def _leading_power(g: TruncatedSeries) -> int:
    lead = g.valuation()
    if lead is None:
        raise DegenerateLine(f"g vanishes through order {g.order}")
    if lead % 2 == 0 or lead < 3:
        raise NotOddLeadingPower(f"g must start at an odd power >= 3, got x^{lead}")
    return (lead + 1) // 2


def build_lienard(g: TruncatedSeries, f: TruncatedSeries) -> LienardData:
    """
    Run the canonical reduction for g = a x^(2n-1) + ..., a > 0.

    Raises HypothesisViolation when the leading coefficient of g is not
    positive.
    """
    n = _leading_power(g)
    a_lead = g[2 * n - 1]
    if a_lead <= 0:
        raise HypothesisViolation(
            'lead-positive', f"leading coefficient of g must be positive, got {a_lead}"
        )

    order = min(g.order, f.order + 1)
    F = f.integrate(max_order=order)
    G = g.integrate(max_order=order)

    u = G.scale_by(2 * n).root(2 * n)
    scale = u.scale
    w = u.without_scale()
    if w[1] != 1:
        # the root folded a rational scale into the coefficients
        scale = ScaleTag(w[1] ** (2 * n), 2 * n)
        w = w / w[1]

    w_inverse = w.reversion()
    alpha = w_inverse.compose(-w)

    g_back = g.compose(w_inverse)
    f_back = f.compose(w_inverse)
    phi = f_back / g_back.shift_down(2 * n - 1)

    logger.debug(f"Lienard reduction: n={n}, a={a_lead}, alpha order {alpha.order}, phi order {phi.order}")

    return LienardData(
        f=f, g=g, n=n, a_lead=a_lead, F=F, G=G, u=u, w=w,
        alpha=alpha, phi=phi, scale=scale,
    )


def B_coefficients(F: TruncatedSeries, alpha: TruncatedSeries) -> List[Fraction]:
    """B_1..B_M of F(alpha(x)) - F(x)."""
    difference = F.compose(alpha) - F
    return list(difference.coeffs[1:])


def hypothesis_case(g: TruncatedSeries, f: TruncatedSeries, n: int) -> HypothesisCase:
    """Check the two structural conditions under which cycles can be forced."""
    a_lead = g[2 * n - 1]
    if n == 2 and f.coefficient(0) == 0 and f.coefficient(1) ** 2 - 8 * a_lead < 0:
        return HypothesisCase.N2_FOCUS

    if (g.is_odd() and f.is_even()
            and all(f.coefficient(j) == 0 for j in range(n - 1))
            and f.coefficient(n - 1) ** 2 - 4 * n * a_lead < 0):
        return HypothesisCase.SYMMETRIC

    return HypothesisCase.NONE


def focal_B(data: LienardData) -> FocalReport:
    """
    Read stability and focus order off the odd-index B_j.

    The first nonzero odd index i is compared with 2l + 1, l = [n/2]:
    i >= 2l + 1 gives a focus of order (i - 2l - 1)/2, stable iff B_i < 0;
    smaller i lies in the node range, where only the sign is reported.
    """
    B = B_coefficients(data.F, data.alpha)
    threshold = 2 * data.l + 1
    diagnostics: List[str] = []

    first = next((j for j in range(1, len(B) + 1, 2) if B[j - 1] != 0), None)

    if first is None:
        if len(B) < threshold:
            stability = Stability.UNDETERMINED
            diagnostics.append(f"series order too low: only B_1..B_{len(B)} available")
        elif data.g.is_odd() and data.f.is_odd():
            stability = Stability.CENTER_SYMMETRIC
        else:
            stability = Stability.CENTER_CANDIDATE
        focus_order = None
    else:
        stability = Stability.STABLE if B[first - 1] < 0 else Stability.UNSTABLE
        if first < threshold:
            focus_order = None
            diagnostics.append(NODE_RANGE)
        else:
            focus_order = (first - threshold) // 2

    filippov = filippov_check(data)
    decided = (Stability.STABLE, Stability.UNSTABLE)
    if stability in decided and filippov in decided and filippov != stability:
        diagnostics.append(f"filippov verdict {filippov.value} disagrees")
        logger.warning(f"B sign gives {stability.value}, fbar sign gives {filippov.value}")

    return FocalReport(
        n=data.n,
        p_n=data.p_n,
        B=B,
        first_odd_nonzero=first,
        focus_order=focus_order,
        stability=stability,
        hypothesis_case=hypothesis_case(data.g, data.f, data.n),
        order=data.alpha.order,
        filippov=filippov,
        diagnostics=diagnostics,
    )


def filippov_check(data: LienardData) -> Stability:
    """
    Stability from the canonical damping fbar alone.

    Requires fbar = O(z^(n-1)) with fbar_(n-1)^2 < 4n; then the first
    nonzero fbar_(2l) with 2l >= n - 1 decides: stable iff it is positive.
    """
    n = data.n
    phi = data.phi

    if any(phi.coefficient(j) != 0 for j in range(min(n - 1, phi.order + 1))):
        return Stability.UNDETERMINED
    # fbar_(n-1)^2 = phi_(n-1)^2 * s^(2n) = phi_(n-1)^2 * a
    if n - 1 <= phi.order and phi[n - 1] ** 2 * data.a_lead >= 4 * n:
        return Stability.UNDETERMINED

    start = n - 1 if (n - 1) % 2 == 0 else n
    for j in range(start, phi.order + 1, 2):
        if phi[j] != 0:
            return Stability.STABLE if phi[j] > 0 else Stability.UNSTABLE
    return Stability.CENTER_CANDIDATE


def linear_B_map(family, values: Optional[Dict[str, Any]] = None,
                 parameters: Optional[List[str]] = None,
                 order: Optional[int] = None) -> Tuple[List[Fraction], Dict[str, List[Fraction]]]:
    """
    Exact affine map parameters -> B for a lienard family whose parameters
    enter f only.

    Returns (offset, columns): B(values) = offset + sum_p values[p] * columns[p],
    where offset collects the parameter-free part of f.
    """
    if family.kind != 'lienard':
        raise ConfigError("linear_B_map needs a lienard-kind family")
    parameters = list(family.parameter_names if parameters is None else parameters)
    for name in parameters:
        if family.targets_of(name) != ['f']:
            raise ConfigError(f"parameter '{name}' must enter f only, enters {family.targets_of(name)}")

    g, f = family.instantiate(values, order=order).lienard_pair()
    data = build_lienard(g, f)

    zeroed = {name: 0 for name in family.parameter_names}
    _, f_fixed = family.instantiate(zeroed, order=order).lienard_pair()
    offset = B_coefficients(f_fixed.integrate(max_order=data.F.order), data.alpha)

    columns = {}
    for name in parameters:
        _, f_direction = family.direction(name, order=order).lienard_pair()
        columns[name] = B_coefficients(f_direction.integrate(max_order=data.F.order), data.alpha)
    return offset, columns
