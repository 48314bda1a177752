"""
Truncated Power Series Module - exact univariate series algebra.

A TruncatedSeries holds rational coefficients c_0..c_N together with its
truncation order N. Every operation is exact and returns a new value; the
result order follows the propagation rules below:

- add/sub/mul/div: min of the operand orders
- compose(outer, inner): min(N_outer * m, N_inner), m = valuation of inner
- integrate: N + 1, capped at max(max_order, N)
- differentiate: N - 1

Series produced by root_k may carry a ScaleTag: a positive constant
base**(1/root) that multiplies every coefficient and is only realised in
floating point. Sign decisions never depend on it.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from src.errors import (
    CompositionRequiresZeroConstant,
    DivisionBySingularSeries,
    NotInvertibleAtOrigin,
    RootBranchUndefined,
    RootOfNonpositiveLeading,
    ScaleTagMismatch,
)
from src.series.rational import RationalLike, as_rational, format_rational, rational_root

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 40
DEFAULT_MAX_ORDER = 40

Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class ScaleTag:
    """Positive multiplicative constant base**(1/root)."""
    base: Fraction = Fraction(1)
    root: int = 1

    def __post_init__(self):
        if self.base <= 0 or self.root < 1:
            raise ValueError(f"invalid scale tag {self.base}^(1/{self.root})")
        object.__setattr__(self, 'base', Fraction(self.base))
        if self.base == 1:
            object.__setattr__(self, 'root', 1)

    @property
    def is_unit(self) -> bool:
        return self.base == 1

    @property
    def value(self) -> float:
        return float(self.base) ** (1.0 / self.root)

    def __mul__(self, other: 'ScaleTag') -> 'ScaleTag':
        if self.is_unit:
            return other
        if other.is_unit:
            return self
        common = self.root * other.root // math.gcd(self.root, other.root)
        base = self.base ** (common // self.root) * other.base ** (common // other.root)
        return ScaleTag(base, common)

    def __pow__(self, exponent: int) -> 'ScaleTag':
        if exponent >= 0:
            return ScaleTag(self.base ** exponent, self.root)
        return ScaleTag(Fraction(1) / self.base ** (-exponent), self.root)

    def __str__(self):
        if self.is_unit:
            return "1"
        return f"({format_rational(self.base)})^(1/{self.root})"


UNIT_SCALE = ScaleTag()


def _mul_truncated(a: Sequence[Fraction], b: Sequence[Fraction], order: int) -> List[Fraction]:
    """Cauchy product keeping degrees 0..order."""
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a[:order + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[:order + 1 - i]):
            if bj:
                out[i + j] += ai * bj
    return out


@dataclass(frozen=True)
class TruncatedSeries:
    """Univariate power series with exact rational coefficients, known to x^order."""
    coeffs: Tuple[Fraction, ...]
    order: int
    scale: ScaleTag = field(default=UNIT_SCALE)

    def __post_init__(self):
        if self.order < 0:
            raise ValueError(f"negative truncation order {self.order}")
        coeffs = tuple(as_rational(c) for c in self.coeffs)
        if len(coeffs) != self.order + 1:
            raise ValueError(
                f"expected {self.order + 1} coefficients for order {self.order}, got {len(coeffs)}"
            )
        object.__setattr__(self, 'coeffs', coeffs)

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[RationalLike], order: int,
                    scale: ScaleTag = UNIT_SCALE) -> 'TruncatedSeries':
        """Pad with zeros or truncate to exactly order+1 coefficients."""
        values = [as_rational(c) for c in coeffs][:order + 1]
        values += [Fraction(0)] * (order + 1 - len(values))
        return cls(tuple(values), order, scale)

    @classmethod
    def from_terms(cls, terms: dict, order: int) -> 'TruncatedSeries':
        """Build from {degree: coefficient}; degrees above order are dropped."""
        values = [Fraction(0)] * (order + 1)
        for degree, coefficient in terms.items():
            if degree < 0:
                raise ValueError(f"negative degree {degree}")
            if degree <= order:
                values[degree] += as_rational(coefficient)
        return cls(tuple(values), order)

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER) -> 'TruncatedSeries':
        return cls.from_coeffs([], order)

    @classmethod
    def constant(cls, value: RationalLike, order: int = DEFAULT_ORDER) -> 'TruncatedSeries':
        return cls.from_coeffs([value], order)

    @classmethod
    def identity(cls, order: int = DEFAULT_ORDER) -> 'TruncatedSeries':
        return cls.from_coeffs([0, 1], order)

    @classmethod
    def monomial(cls, degree: int, coefficient: RationalLike = 1,
                 order: int = DEFAULT_ORDER) -> 'TruncatedSeries':
        return cls.from_terms({degree: coefficient}, order)

    # ------------------------------------------------------------------
    # inspection

    def __getitem__(self, degree: int) -> Fraction:
        if degree < 0:
            raise IndexError(degree)
        if degree > self.order:
            raise IndexError(f"degree {degree} beyond truncation order {self.order}")
        return self.coeffs[degree]

    def coefficient(self, degree: int) -> Fraction:
        """Coefficient of x^degree, zero for negative degrees."""
        if degree < 0:
            return Fraction(0)
        return self[degree]

    def valuation(self) -> Optional[int]:
        """Lowest degree with a nonzero coefficient, None for the zero series."""
        for degree, c in enumerate(self.coeffs):
            if c != 0:
                return degree
        return None

    def degree(self) -> Optional[int]:
        """Highest degree with a nonzero coefficient."""
        for degree in range(self.order, -1, -1):
            if self.coeffs[degree] != 0:
                return degree
        return None

    def is_zero(self) -> bool:
        return self.valuation() is None

    def is_odd(self) -> bool:
        return all(c == 0 for c in self.coeffs[0::2])

    def is_even(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])

    def odd_part(self) -> 'TruncatedSeries':
        return self._with([c if i % 2 else Fraction(0) for i, c in enumerate(self.coeffs)])

    def even_part(self) -> 'TruncatedSeries':
        return self._with([Fraction(0) if i % 2 else c for i, c in enumerate(self.coeffs)])

    def _with(self, coeffs: Sequence[Fraction], order: Optional[int] = None,
              scale: Optional[ScaleTag] = None) -> 'TruncatedSeries':
        order = self.order if order is None else order
        return TruncatedSeries.from_coeffs(coeffs, order, self.scale if scale is None else scale)

    def truncate(self, order: int) -> 'TruncatedSeries':
        """Lower the truncation order (never raises it)."""
        order = min(order, self.order)
        return self._with(self.coeffs[:order + 1], order)

    def filter_degree(self, max_degree: int) -> 'TruncatedSeries':
        """Zero out terms above max_degree, keeping the truncation order."""
        return self._with([c if i <= max_degree else Fraction(0) for i, c in enumerate(self.coeffs)])

    def without_scale(self) -> 'TruncatedSeries':
        """Same coefficients with the scale tag dropped."""
        return self._with(self.coeffs, scale=UNIT_SCALE)

    def normalized(self) -> 'TruncatedSeries':
        """Fold the scale tag into the coefficients when it is rational."""
        if self.scale.is_unit:
            return self
        factor = rational_root(self.scale.base, self.scale.root)
        if factor is None:
            return self
        return self._with([c * factor for c in self.coeffs], scale=UNIT_SCALE)

    # ------------------------------------------------------------------
    # ring operations

    def _check_scale(self, other: 'TruncatedSeries'):
        if self.scale != other.scale:
            if self.is_zero():
                return other.scale
            if other.is_zero():
                return self.scale
            raise ScaleTagMismatch(f"cannot add series scaled by {self.scale} and {other.scale}")
        return self.scale

    def __add__(self, other: Union['TruncatedSeries', Scalar]) -> 'TruncatedSeries':
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(as_rational(other), self.order)
        scale = self._check_scale(other)
        order = min(self.order, other.order)
        return TruncatedSeries.from_coeffs(
            [a + b for a, b in zip(self.coeffs[:order + 1], other.coeffs[:order + 1])],
            order, scale,
        )

    __radd__ = __add__

    def __neg__(self) -> 'TruncatedSeries':
        return self._with([-c for c in self.coeffs])

    def __sub__(self, other: Union['TruncatedSeries', Scalar]) -> 'TruncatedSeries':
        return self + (-other)

    def __rsub__(self, other: Scalar) -> 'TruncatedSeries':
        return (-self) + other

    def scale_by(self, factor: RationalLike) -> 'TruncatedSeries':
        factor = as_rational(factor)
        return self._with([c * factor for c in self.coeffs])

    def __mul__(self, other: Union['TruncatedSeries', Scalar]) -> 'TruncatedSeries':
        if not isinstance(other, TruncatedSeries):
            return self.scale_by(other)
        order = min(self.order, other.order)
        return TruncatedSeries.from_coeffs(
            _mul_truncated(self.coeffs, other.coeffs, order), order, self.scale * other.scale,
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> 'TruncatedSeries':
        if exponent < 0:
            return self.reciprocal() ** (-exponent)
        result = TruncatedSeries.constant(1, self.order)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def reciprocal(self) -> 'TruncatedSeries':
        """1/self for a series with nonzero constant term."""
        c0 = self.coeffs[0]
        if c0 == 0:
            raise DivisionBySingularSeries("reciprocal of a series with zero constant term")
        inverse = [Fraction(0)] * (self.order + 1)
        inverse[0] = 1 / c0
        for k in range(1, self.order + 1):
            acc = sum((self.coeffs[i] * inverse[k - i] for i in range(1, k + 1)), Fraction(0))
            inverse[k] = -acc / c0
        return TruncatedSeries.from_coeffs(inverse, self.order, self.scale ** -1)

    def __truediv__(self, other: Union['TruncatedSeries', Scalar]) -> 'TruncatedSeries':
        if not isinstance(other, TruncatedSeries):
            other = as_rational(other)
            if other == 0:
                raise ZeroDivisionError("division of a series by zero")
            return self.scale_by(1 / other)
        return self * other.reciprocal()

    def shift_down(self, k: int) -> 'TruncatedSeries':
        """self / x^k; the k lowest coefficients must vanish."""
        if k == 0:
            return self
        if any(c != 0 for c in self.coeffs[:k]):
            raise DivisionBySingularSeries(f"series is not divisible by x^{k}")
        order = self.order - k
        if order < 0:
            raise DivisionBySingularSeries(f"order {self.order} too low to divide by x^{k}")
        return self._with(self.coeffs[k:], order)

    def shift_up(self, k: int) -> 'TruncatedSeries':
        """self * x^k, known to order + k."""
        return self._with([Fraction(0)] * k + list(self.coeffs), self.order + k)

    # ------------------------------------------------------------------
    # composition and inversion

    def compose(self, inner: 'TruncatedSeries') -> 'TruncatedSeries':
        """self(inner(x)); inner must vanish at the origin."""
        if inner.coeffs[0] != 0:
            raise CompositionRequiresZeroConstant(
                f"inner series has constant term {inner.coeffs[0]}"
            )
        if not inner.scale.is_unit:
            raise ScaleTagMismatch("inner series of a composition must be unscaled")

        m = inner.valuation()
        order = inner.order if m is None else min(self.order * m, inner.order)

        # Horner in the inner series
        acc = [Fraction(0)] * (order + 1)
        for c in reversed(self.coeffs):
            acc = _mul_truncated(acc, inner.coeffs, order)
            acc[0] += c
        return TruncatedSeries.from_coeffs(acc, order, self.scale)

    def __call__(self, inner: 'TruncatedSeries') -> 'TruncatedSeries':
        return self.compose(inner)

    def reversion(self) -> 'TruncatedSeries':
        """Compositional inverse g with self(g(x)) = x to the series order."""
        if self.coeffs[0] != 0:
            raise CompositionRequiresZeroConstant("reversion needs f(0) = 0")
        if self.order < 1 or self.coeffs[1] == 0:
            raise NotInvertibleAtOrigin("reversion needs f'(0) != 0")
        if not self.scale.is_unit:
            raise ScaleTagMismatch("normalize the series before reverting it")

        identity = TruncatedSeries.identity(self.order)
        derivative = self.differentiate()
        inverse = TruncatedSeries.monomial(1, 1 / self.coeffs[1], self.order)

        # Newton: each step doubles the number of correct coefficients
        for _ in range(self.order.bit_length() + 2):
            residual = self.compose(inverse) - identity
            if residual.is_zero():
                break
            # f'(g) is known one degree short; that coefficient only meets
            # the residual's constant term, which is zero
            slope = TruncatedSeries.from_coeffs(derivative.compose(inverse).coeffs, self.order)
            inverse = inverse - residual / slope
        return inverse

    # ------------------------------------------------------------------
    # roots

    def _unit_power(self, exponent: Fraction) -> 'TruncatedSeries':
        """(1 + h)^exponent for a series with constant term 1."""
        a = self.coeffs
        out = [Fraction(0)] * (self.order + 1)
        out[0] = Fraction(1)
        for j in range(1, self.order + 1):
            acc = Fraction(0)
            for i in range(1, j + 1):
                if a[i]:
                    acc += (exponent * i - (j - i)) * a[i] * out[j - i]
            out[j] = acc / j
        return TruncatedSeries.from_coeffs(out, self.order)

    def root(self, k: int) -> 'TruncatedSeries':
        """
        Positive k-th root of f = c x^m (1 + h(x)) with c > 0 and k | m.

        The result is x^(m/k) (1 + h)^(1/k) times c^(1/k); that factor is
        folded into the coefficients when c is a perfect k-th power and
        carried as a ScaleTag otherwise.
        """
        if k < 1:
            raise ValueError(f"root index must be positive, got {k}")
        m = self.valuation()
        if m is None:
            raise RootBranchUndefined("zero series has no leading monomial")
        if m % k:
            raise RootBranchUndefined(f"leading degree {m} is not divisible by {k}")
        c = self.coeffs[m]
        if c <= 0:
            raise RootOfNonpositiveLeading(f"leading coefficient {c} is not positive")

        unit = self.shift_down(m).without_scale() / c
        root = unit._unit_power(Fraction(1, k)).shift_up(m // k)

        tag = ScaleTag(c, k) * ScaleTag(self.scale.base, self.scale.root * k)
        return TruncatedSeries.from_coeffs(root.coeffs, root.order, tag).normalized()

    # ------------------------------------------------------------------
    # calculus

    def integrate(self, max_order: int = DEFAULT_MAX_ORDER) -> 'TruncatedSeries':
        """Antiderivative with zero constant term."""
        order = min(self.order + 1, max(max_order, self.order))
        coeffs = [Fraction(0)] + [c / (i + 1) for i, c in enumerate(self.coeffs)]
        return self._with(coeffs[:order + 1], order)

    def differentiate(self) -> 'TruncatedSeries':
        if self.order == 0:
            return self._with([Fraction(0)], 0)
        coeffs = [c * i for i, c in enumerate(self.coeffs)][1:]
        return self._with(coeffs, self.order - 1)

    # ------------------------------------------------------------------
    # floating point bridge

    def to_floats(self) -> np.ndarray:
        """Coefficients as binary floats, scale tag applied."""
        return np.array([float(c) for c in self.coeffs], dtype=float) * self.scale.value

    def eval_float(self, x: float, radius: Optional[float] = None) -> float:
        """Horner evaluation of the truncated polynomial at x."""
        if radius is not None and abs(x) > radius:
            raise ValueError(f"|x|={abs(x)} outside validity radius {radius}")
        return float(npoly.polyval(x, self.to_floats()))

    def residual_bound(self, x: float) -> float:
        """|c_N x^N|, the size of the last retained term at x."""
        return abs(float(self.coeffs[-1]) * self.scale.value * x ** self.order)

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            monomial = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(f"{format_rational(c)}{'*' if monomial else ''}{monomial}")
        body = " + ".join(terms) if terms else "0"
        prefix = "" if self.scale.is_unit else f"{self.scale}*"
        return f"{prefix}({body} + O(x^{self.order + 1}))"


def ring_ops(a: TruncatedSeries, b: Union[TruncatedSeries, Scalar], which: str) -> TruncatedSeries:
    """Dispatch add | sub | mul | div | scale."""
    if which == 'add':
        return a + b
    if which == 'sub':
        return a - b
    if which == 'mul':
        return a * b
    if which == 'div':
        return a / b
    if which == 'scale':
        return a.scale_by(b)
    raise ValueError(f"unknown ring operation: {which}")


def calculus(f: TruncatedSeries, which: str, max_order: int = DEFAULT_MAX_ORDER) -> TruncatedSeries:
    """Dispatch integrate | differentiate."""
    if which == 'integrate':
        return f.integrate(max_order)
    if which == 'differentiate':
        return f.differentiate()
    raise ValueError(f"unknown calculus operation: {which}")
