"""Numerical return maps, focal-value fitting and limit cycle counting."""

from .gtrig import cs_sn, energy_defect, period_T, measured_period, first_return_derivative
from .polar import PolarField, IntegrationStats, polar_rhs, integrate_r
from .return_map import (
    POSITIVE,
    NEGATIVE,
    ReturnMapTable,
    ReturnMapSampler,
    return_map,
    half_turn,
    inverse_return_map,
    geometric_grid,
)
from .fitting import FittedFocal, FocalFitter, fit_focal, richardson_leading
from .cycles import Bracket, CycleSet, CycleCounter, bracket_sign_changes, refine_roots, count_cycles
from .simulate import SectionCrossings, simulate_section_crossings
