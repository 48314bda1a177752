"""
Bivariate truncated polynomials c_ij x^i y^j with i + j <= N.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from src.series.rational import RationalLike, as_rational, format_rational
from src.series.truncated import DEFAULT_ORDER, TruncatedSeries

Exponent = Tuple[int, int]


@dataclass(frozen=True, eq=True)
class BivariateTruncated:
    """Sparse bivariate polynomial truncated at total degree `order`."""
    terms: Dict[Exponent, Fraction] = field(default_factory=dict)
    order: int = DEFAULT_ORDER

    def __post_init__(self):
        cleaned = {}
        for (i, j), c in self.terms.items():
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent ({i}, {j})")
            c = as_rational(c)
            if c != 0 and i + j <= self.order:
                cleaned[(i, j)] = c
        object.__setattr__(self, 'terms', dict(sorted(cleaned.items())))

    __hash__ = None

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER) -> 'BivariateTruncated':
        return cls({}, order)

    @classmethod
    def from_x_series(cls, series: TruncatedSeries, y_power: int = 0,
                      order: Optional[int] = None) -> 'BivariateTruncated':
        """Lift s(x) * y^y_power."""
        order = series.order if order is None else order
        terms = {(i, y_power): c for i, c in enumerate(series.coeffs) if c}
        return cls(terms, order)

    def coefficient(self, i: int, j: int) -> Fraction:
        return self.terms.get((i, j), Fraction(0))

    def __iter__(self) -> Iterator[Tuple[Exponent, Fraction]]:
        return iter(self.terms.items())

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> Optional[int]:
        return max((i + j for i, j in self.terms), default=None)

    def lowest_degree(self) -> Optional[int]:
        return min((i + j for i, j in self.terms), default=None)

    def __add__(self, other: 'BivariateTruncated') -> 'BivariateTruncated':
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, Fraction(0)) + c
        return BivariateTruncated(terms, min(self.order, other.order))

    def __neg__(self) -> 'BivariateTruncated':
        return BivariateTruncated({k: -c for k, c in self.terms.items()}, self.order)

    def __sub__(self, other: 'BivariateTruncated') -> 'BivariateTruncated':
        return self + (-other)

    def scale_by(self, factor: RationalLike) -> 'BivariateTruncated':
        factor = as_rational(factor)
        return BivariateTruncated({k: c * factor for k, c in self.terms.items()}, self.order)

    def flip_y(self) -> 'BivariateTruncated':
        """p(x, -y)."""
        return BivariateTruncated(
            {(i, j): (-c if j % 2 else c) for (i, j), c in self.terms.items()}, self.order
        )

    def truncate_degree(self, m: int) -> 'BivariateTruncated':
        """Drop monomials of total degree > m."""
        return BivariateTruncated(
            {(i, j): c for (i, j), c in self.terms.items() if i + j <= m}, self.order
        )

    def partial_x(self) -> 'BivariateTruncated':
        return BivariateTruncated(
            {(i - 1, j): c * i for (i, j), c in self.terms.items() if i > 0}, self.order
        )

    def partial_y(self) -> 'BivariateTruncated':
        return BivariateTruncated(
            {(i, j - 1): c * j for (i, j), c in self.terms.items() if j > 0}, self.order
        )

    def y_coefficient(self, j: int, order: Optional[int] = None) -> TruncatedSeries:
        """The x-series multiplying y^j."""
        order = self.order if order is None else order
        return TruncatedSeries.from_terms(
            {i: c for (i, jj), c in self.terms.items() if jj == j}, order
        )

    def substitute_y(self, section: TruncatedSeries) -> TruncatedSeries:
        """p(x, s(x)) as a series in x, known to min(order, s.order)."""
        order = min(self.order, section.order)
        if self.is_zero():
            return TruncatedSeries.zero(order)
        section = section.truncate(order)
        top = max(j for _, j in self.terms)

        powers = [TruncatedSeries.constant(1, order)]
        for _ in range(top):
            powers.append(powers[-1] * section)

        result = TruncatedSeries.zero(order)
        for j in range(top + 1):
            coefficient = self.y_coefficient(j, order)
            if not coefficient.is_zero():
                result = result + coefficient * powers[j]
        return result

    def to_matrix(self) -> np.ndarray:
        """Float coefficient matrix C[i, j] for numpy's polyval2d."""
        if not self.terms:
            return np.zeros((1, 1))
        size_x = max(i for i, _ in self.terms) + 1
        size_y = max(j for _, j in self.terms) + 1
        matrix = np.zeros((size_x, size_y))
        for (i, j), c in self.terms.items():
            matrix[i, j] = float(c)
        return matrix

    def eval_float(self, x: float, y: float) -> float:
        return float(npoly.polyval2d(x, y, self.to_matrix()))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in self.terms.items():
            monomial = "*".join(
                p for p in (
                    "" if i == 0 else ("x" if i == 1 else f"x^{i}"),
                    "" if j == 0 else ("y" if j == 1 else f"y^{j}"),
                ) if p
            )
            parts.append(f"{format_rational(c)}{'*' + monomial if monomial else ''}")
        return " + ".join(parts)
