"""Planar nilpotent systems: PVF parsing, section curve and monodromy classification."""

from .planar import (
    GENERAL,
    LIENARD,
    PlanarSystem,
    NilpotentClass,
    section_curve,
    extract_fg,
    classify_nilpotent,
    truncate_degree,
)
from .pvf_parser import PVFParser, SystemFamily, TermLine, parse_family, parse_system, load_family
