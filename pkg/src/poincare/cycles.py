"""
Cycle Counting Module - positive fixed points of the return map.

d is sampled on a log-spaced grid, sign changes are bracketed and refined by
bisection, and every root x* is confirmed by the negative-side crossing
x~ = -r(-pi, x*), which must itself be a fixed point of P.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import bisect
from tqdm import tqdm

from src.errors import AnalysisError
from src.poincare.polar import PolarField
from src.poincare.return_map import half_turn, return_map

logger = logging.getLogger(__name__)

DOWN = '+->-'
UP = '-->+'


@dataclass(frozen=True)
class Bracket:
    x_lo: float
    x_hi: float
    sign_change: str


@dataclass
class CycleSet:
    """Bracketed and refined limit cycles on the positive section."""
    brackets: List[Bracket] = field(default_factory=list)
    roots: List[float] = field(default_factory=list)
    partners: List[Optional[float]] = field(default_factory=list)
    paired: List[bool] = field(default_factory=list)
    r_min: float = 0.0
    r_max: float = 0.0
    grid: Optional[pd.DataFrame] = None

    @property
    def count(self) -> int:
        return len(self.roots)

    @property
    def confirmed(self) -> int:
        return sum(self.paired)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'x_lo': [b.x_lo for b in self.brackets],
            'x_hi': [b.x_hi for b in self.brackets],
            'sign_change': [b.sign_change for b in self.brackets],
            'root': self.roots,
            'partner': self.partners,
            'paired': self.paired,
        })

    def to_dict(self) -> dict:
        return {
            'count': self.count,
            'confirmed': self.confirmed,
            'r_min': self.r_min,
            'r_max': self.r_max,
            'cycles': self.to_frame().to_dict(orient='records'),
        }


def bracket_sign_changes(xs: np.ndarray, ds: np.ndarray, noise_floor: float = 0.0) -> List[Bracket]:
    """
    One bracket per sign change of d between consecutive significant
    samples; |d| <= noise_floor * |x| counts as zero and is skipped.
    """
    xs, ds = np.asarray(xs, dtype=float), np.asarray(ds, dtype=float)
    signs = np.where(np.abs(ds) <= noise_floor * np.abs(xs), 0.0, np.sign(ds))

    brackets = []
    last = None
    for i, s in enumerate(signs):
        if s == 0.0:
            continue
        if last is not None and signs[last] != s:
            brackets.append(Bracket(float(xs[last]), float(xs[i]), DOWN if signs[last] > 0 else UP))
        last = i
    return brackets


def refine_roots(func: Callable[[float], float], brackets: List[Bracket],
                 xtol: float = 1e-10) -> List[float]:
    roots = []
    for b in brackets:
        roots.append(float(bisect(func, b.x_lo, b.x_hi, xtol=xtol)))
    return roots


class CycleCounter:
    """Counts small limit cycles of a PolarField."""

    def __init__(self, config: dict):
        self.config = config
        settings = config.get('cycles', {})
        self.r_min = settings.get('r_min', 1e-3)
        self.r_max = settings.get('r_max', 0.2)
        self.grid = settings.get('grid', 40)
        self.xtol = settings.get('xtol', 1e-10)
        self.pair_tol = settings.get('pair_tol', 1e-6)
        self.noise_floor = settings.get('noise_floor', 1e-9)
        self.show_progress = config.get('output', {}).get('progress', True)

    def sample_displacement(self, field: PolarField, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        d on the grid. Failures before the first success raise r_min; the
        first failure after it shrinks r_max there.
        """
        kept, values = [], []
        for x in tqdm(xs, desc="Cycle grid", disable=not self.show_progress):
            try:
                _, d = return_map(field, float(x))
            except AnalysisError as e:
                if not kept:
                    logger.warning(f"Integration failed at x0={x:.6e} ({e}); raising r_min")
                    continue
                logger.warning(f"Integration failed at x0={x:.6e} ({e}); shrinking r_max to {kept[-1]:.6e}")
                break
            kept.append(float(x))
            values.append(d)
        return np.array(kept), np.array(values)

    def pair(self, field: PolarField, root: float) -> Tuple[Optional[float], bool]:
        """Negative-side partner of a positive fixed point and whether P fixes it."""
        try:
            partner = half_turn(field, root)
            P, _ = return_map(field, partner)
        except AnalysisError as e:
            logger.warning(f"Pairing failed for cycle at x0={root:.6e}: {e}")
            return None, False
        ok = partner < 0 and abs(P - partner) <= self.pair_tol * abs(partner)
        if not ok:
            logger.warning(f"Cycle at x0={root:.6e}: partner {partner:.6e} maps to {P:.6e}")
        return partner, ok

    def count(self, field: PolarField, r_max: Optional[float] = None,
              grid: Optional[int] = None, r_min: Optional[float] = None) -> CycleSet:
        r_max = self.r_max if r_max is None else r_max
        grid = self.grid if grid is None else grid
        r_min = self.r_min if r_min is None else r_min
        if r_max > field.validity_radius:
            logger.warning(f"r_max={r_max} beyond validity radius; using {field.validity_radius}")
            r_max = field.validity_radius

        xs, ds = self.sample_displacement(field, np.geomspace(r_min, r_max, grid))
        brackets = bracket_sign_changes(xs, ds, self.noise_floor)

        def displacement(x):
            return return_map(field, x)[1]

        roots = refine_roots(displacement, brackets, self.xtol)
        partners, paired = [], []
        for root in roots:
            partner, ok = self.pair(field, root)
            partners.append(partner)
            paired.append(ok)

        logger.info(f"Found {len(roots)} limit cycles in [{r_min:.3e}, {xs[-1] if len(xs) else r_min:.3e}]")
        return CycleSet(
            brackets=brackets, roots=roots, partners=partners, paired=paired,
            r_min=r_min, r_max=float(xs[-1]) if len(xs) else r_min,
            grid=pd.DataFrame({'x0': xs, 'd': ds}),
        )


def count_cycles(field: PolarField, r_max: float, grid: int,
                 config: Optional[dict] = None) -> CycleSet:
    return CycleCounter(config or {}).count(field, r_max=r_max, grid=grid)
