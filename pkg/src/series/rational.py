"""
Exact rational helpers shared by the series engine and the PVF format.

Rationals are fractions.Fraction throughout: always in lowest terms with a
positive denominator.
"""

import re
from fractions import Fraction
from typing import Optional, Union

RationalLike = Union[int, Fraction, str]

# integer or integer/integer, no decimals, no exponents
RATIONAL_PATTERN = re.compile(r'^([+-]?\d+)(?:/([+-]?\d+))?$')


def parse_rational(token: str) -> Fraction:
    """
    Parse an exact rational written as 'p' or 'p/q'.

    Decimal notation is rejected so that every coefficient entering the
    series engine is exact.
    """
    match = RATIONAL_PATTERN.match(token.strip())
    if not match:
        raise ValueError(f"not an exact rational: {token!r}")

    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) else 1
    if denominator == 0:
        raise ValueError(f"zero denominator in {token!r}")

    return Fraction(numerator, denominator)


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings; floats are not accepted."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_rational(value: Fraction) -> str:
    """Render as 'p' or 'p/q'."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def integer_root(n: int, k: int) -> Optional[int]:
    """Exact non-negative integer k-th root of n >= 0, or None."""
    if n < 0 or k < 1:
        return None
    if n in (0, 1) or k == 1:
        return n

    # Newton iteration on integers, starting above the root
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y

    return x if x ** k == n else None


def rational_root(value: Fraction, k: int) -> Optional[Fraction]:
    """Exact positive k-th root of a positive rational, or None."""
    if value <= 0:
        return None
    num = integer_root(value.numerator, k)
    den = integer_root(value.denominator, k)
    if num is None or den is None:
        return None
    return Fraction(num, den)
