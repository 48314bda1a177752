"""Exact generalized focal values for Lienard-form systems."""

from .lienard import (
    Stability,
    HypothesisCase,
    NODE_RANGE,
    LienardData,
    FocalReport,
    build_lienard,
    B_coefficients,
    hypothesis_case,
    focal_B,
    filippov_check,
    linear_B_map,
)
from .analyzer import FocalAnalyzer
