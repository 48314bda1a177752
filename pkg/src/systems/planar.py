"""
Planar System Module - nilpotent vector fields and their section-curve data.

Handles systems of the form

    x' = y + X(x, y),   y' = Y(x, y),   X, Y = O(|x, y|^2)

and the Lienard subfamily x' = y, y' = -g(x) - y f(x). The origin is
classified by the monodromy criterion on the curve y = F(x) solving
y + X(x, y) = 0.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

from src.errors import DegenerateLine, HypothesisViolation, NotOddLeadingPower
from src.series import BivariateTruncated, TruncatedSeries, DEFAULT_ORDER

logger = logging.getLogger(__name__)

GENERAL = 'general'
LIENARD = 'lienard'


@dataclass(frozen=True)
class PlanarSystem:
    """Planar field in orientation +1 form with resolved rational coefficients."""
    X: BivariateTruncated
    Y: BivariateTruncated
    kind: str = GENERAL
    series_order: int = DEFAULT_ORDER
    label: str = ""
    orientation: int = 1
    parameters: Dict[str, Fraction] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    __hash__ = None

    @classmethod
    def general(cls, X: BivariateTruncated, Y: BivariateTruncated, orientation: int = 1,
                series_order: int = DEFAULT_ORDER, label: str = "",
                parameters: Optional[Dict[str, Fraction]] = None) -> 'PlanarSystem':
        """
        Build from x' = c*y + X, y' = Y.

        Orientation -1 is normalised with y -> -y, which turns the field into
        x' = y + X(x, -y), y' = -Y(x, -y).
        """
        if orientation not in (1, -1):
            raise ValueError(f"orientation must be +1 or -1, got {orientation}")
        flipped = orientation == -1
        if flipped:
            X, Y = X.flip_y(), -Y.flip_y()
        return cls(
            X=X, Y=Y, kind=GENERAL, series_order=series_order, label=label,
            orientation=1, parameters=dict(parameters or {}),
            metadata={'orientation_flipped': flipped, 'original_orientation': orientation},
        )

    @classmethod
    def lienard(cls, g: TruncatedSeries, f: TruncatedSeries, orientation: int = 1,
                series_order: Optional[int] = None, label: str = "",
                parameters: Optional[Dict[str, Fraction]] = None) -> 'PlanarSystem':
        """Build x' = c*y, y' = -g(x) - y f(x)."""
        if orientation not in (1, -1):
            raise ValueError(f"orientation must be +1 or -1, got {orientation}")
        order = series_order if series_order is not None else min(g.order, f.order + 1)
        flipped = orientation == -1
        if flipped:
            # y -> -y keeps f and negates g
            g = -g
        degree = max(g.degree() or 0, (f.degree() or 0) + 1)
        bivariate_order = max(order, degree)
        Y = -(BivariateTruncated.from_x_series(g, 0, bivariate_order)
              + BivariateTruncated.from_x_series(f, 1, bivariate_order))
        return cls(
            X=BivariateTruncated.zero(bivariate_order), Y=Y, kind=LIENARD,
            series_order=order, label=label, orientation=1,
            parameters=dict(parameters or {}),
            metadata={'orientation_flipped': flipped, 'original_orientation': orientation},
        )

    @property
    def degree(self) -> int:
        return max(self.X.degree() or 0, self.Y.degree() or 0)

    def with_order(self, series_order: int) -> 'PlanarSystem':
        """Same field analysed at a different series order."""
        bivariate_order = max(series_order, self.degree)
        return PlanarSystem(
            X=BivariateTruncated(self.X.terms, bivariate_order),
            Y=BivariateTruncated(self.Y.terms, bivariate_order),
            kind=self.kind, series_order=series_order, label=self.label,
            orientation=self.orientation, parameters=dict(self.parameters),
            metadata=dict(self.metadata),
        )

    def lienard_pair(self) -> Tuple[TruncatedSeries, TruncatedSeries]:
        """(g, f) read straight off Y = -g(x) - y f(x)."""
        if self.kind != LIENARD:
            raise ValueError("lienard_pair() needs a lienard-kind system")
        order = self.series_order
        return -self.Y.y_coefficient(0, order), -self.Y.y_coefficient(1, order)


@dataclass(frozen=True)
class NilpotentClass:
    """Monodromy data of the origin."""
    n: int
    a: Fraction
    b: Fraction
    monodromic: bool
    p_n: int
    linear_trace: Fraction = Fraction(0)

    @property
    def nilpotent(self) -> bool:
        """False when y' carries a linear damping term (node regime)."""
        return self.linear_trace == 0

    @property
    def discriminant(self) -> Fraction:
        return self.b ** 2 + 4 * self.a * self.n

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'a': self.a,
            'b': self.b,
            'discriminant': self.discriminant,
            'monodromic': self.monodromic,
            'p_n': self.p_n,
            'nilpotent': self.nilpotent,
            'linear_trace': self.linear_trace,
        }


def section_curve(sys: PlanarSystem) -> TruncatedSeries:
    """
    Solve y + X(x, y) = 0 for y = F(x) with F(0) = 0.

    Fixed-point iteration F <- -X(x, F); each pass fixes at least one more
    coefficient because X has no linear terms.
    """
    order = sys.series_order
    F = TruncatedSeries.zero(order)
    if sys.X.is_zero():
        return F

    for _ in range(order + 1):
        updated = TruncatedSeries.from_coeffs((-sys.X.substitute_y(F)).coeffs, order)
        if updated == F:
            break
        F = updated
    return F


def extract_fg(sys: PlanarSystem,
               F: Optional[TruncatedSeries] = None) -> Tuple[TruncatedSeries, TruncatedSeries]:
    """
    g = -Y(x, F(x)),  f = -[dX/dx + dY/dy](x, F(x)).
    """
    if sys.kind == LIENARD:
        return sys.lienard_pair()

    F = section_curve(sys) if F is None else F
    order = sys.series_order
    g = -sys.Y.substitute_y(F)
    divergence = sys.X.partial_x() + sys.Y.partial_y()
    f = -divergence.substitute_y(F)
    return (TruncatedSeries.from_coeffs(g.coeffs, order) if g.order >= order else g,
            TruncatedSeries.from_coeffs(f.coeffs, order) if f.order >= order else f)


def classify_nilpotent(g: TruncatedSeries, f: TruncatedSeries) -> NilpotentClass:
    """
    Monodromy criterion on the pair (g, f).

    With Y(x, F(x)) = a x^(2n-1) + ... and g = -Y(x, F(x)), a is minus the
    leading coefficient of g; b = -f_(n-1). Monodromic iff a < 0 and
    b^2 + 4an < 0.
    """
    lead = g.valuation()
    if lead is None:
        raise DegenerateLine(f"g vanishes through order {g.order}")
    if lead % 2 == 0:
        raise NotOddLeadingPower(f"leading power x^{lead} of g is even")
    n = (lead + 1) // 2
    if n < 2:
        raise HypothesisViolation('nilpotent', "g has a linear term; the linear part is not nilpotent")

    a = -g[lead]
    b = -f.coefficient(n - 1) if n - 1 <= f.order else Fraction(0)
    monodromic = a < 0 and b ** 2 + 4 * a * n < 0
    p_n = 1 if n % 2 == 0 else 0

    trace = -f.coefficient(0)
    if trace != 0:
        logger.warning(f"linear damping {trace} at the origin: node regime, not nilpotent")

    return NilpotentClass(n=n, a=a, b=b, monodromic=monodromic, p_n=p_n, linear_trace=trace)


def truncate_degree(sys: PlanarSystem, m: int) -> PlanarSystem:
    """Remove all monomials of total degree > m from X and Y."""
    if m < 2:
        raise ValueError(f"truncation degree must be >= 2, got {m}")
    return PlanarSystem(
        X=sys.X.truncate_degree(m),
        Y=sys.Y.truncate_degree(m),
        kind=sys.kind, series_order=sys.series_order,
        label=f"{sys.label} [deg<={m}]" if sys.label else f"deg<={m}",
        orientation=sys.orientation, parameters=dict(sys.parameters),
        metadata={**sys.metadata, 'truncated_degree': m},
    )
