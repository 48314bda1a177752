"""Exact truncated series algebra over the rationals."""
from .rational import parse_rational, format_rational, as_rational, rational_root
from .truncated import TruncatedSeries, ScaleTag, UNIT_SCALE, ring_ops, calculus, DEFAULT_ORDER, DEFAULT_MAX_ORDER
from .bivariate import BivariateTruncated
