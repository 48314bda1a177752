"""
Return Map Module - sampling P(x0) on the section curve y = F(x).

P(x0) = r(-2pi, x0) for x0 > 0; for x0 < 0 the turn runs to +2pi when n is
even and to -2pi when n is odd.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq
from tqdm import tqdm

from src.errors import AnalysisError
from src.poincare.polar import PolarField, integrate_r

logger = logging.getLogger(__name__)

POSITIVE = 'positive-side'
NEGATIVE = 'negative-side'
TWO_PI = 2.0 * math.pi


def return_map(field: PolarField, x0: float) -> Tuple[float, float]:
    """(P(x0), P(x0) - x0)."""
    if x0 == 0.0:
        return 0.0, 0.0
    if x0 > 0 or field.n % 2 == 1:
        P = integrate_r(field, 0.0, -TWO_PI, x0)
    else:
        P = integrate_r(field, 0.0, TWO_PI, x0)
    return P, P - x0


def half_turn(field: PolarField, x0: float) -> float:
    """x-coordinate where the orbit through (x0, F(x0)), x0 > 0, next meets the section."""
    return -integrate_r(field, 0.0, -math.pi, x0)


def inverse_return_map(field: PolarField, z: float, xtol: float = 1e-15) -> float:
    """
    Solve r(-2pi, x) = z for x by brentq, the bracket growing
    geometrically around z.
    """
    if z == 0.0:
        return 0.0

    def residual(x):
        return integrate_r(field, 0.0, -TWO_PI, x) - z

    sign = 1.0 if z > 0 else -1.0
    inner, outer = 0.5 * abs(z), min(2.0 * abs(z), field.validity_radius)
    for _ in range(8):
        lo, hi = sorted((sign * inner, sign * outer))
        if residual(lo) * residual(hi) <= 0:
            return brentq(residual, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
        inner, outer = 0.5 * inner, min(1.5 * outer, field.validity_radius)
    raise AnalysisError(f"could not bracket the inverse return map at z={z}")


def geometric_grid(x_min: float, x_max: float, samples: int) -> np.ndarray:
    if not 0 < x_min < x_max:
        raise ValueError(f"need 0 < x_min < x_max, got {x_min}, {x_max}")
    return np.geomspace(x_min, x_max, samples)


@dataclass
class ReturnMapTable:
    """Sampled (x0, P, d) with integrator counters."""
    samples: pd.DataFrame
    direction: str = POSITIVE
    stats: Dict = field(default_factory=dict)
    failures: List[float] = field(default_factory=list)

    def __post_init__(self):
        x0 = self.samples['x0'].to_numpy()
        if len(x0) > 1:
            steps = np.diff(x0)
            if not (np.all(steps > 0) or np.all(steps < 0)):
                raise ValueError("x0 values must be strictly monotone within a table")

    @property
    def x0(self) -> np.ndarray:
        return self.samples['x0'].to_numpy()

    @property
    def d(self) -> np.ndarray:
        return self.samples['d'].to_numpy()

    def __len__(self):
        return len(self.samples)

    def to_csv(self, path: str | Path):
        """Header x0,P,d with round-trip float precision."""
        self.samples[['x0', 'P', 'd']].to_csv(path, index=False, float_format='%.17g')

    def to_dict(self) -> Dict:
        return {
            'direction': self.direction,
            'samples': len(self.samples),
            'max_abs_d': float(np.max(np.abs(self.d))) if len(self.samples) else 0.0,
            'stats': dict(self.stats),
            'failures': list(self.failures),
        }


class ReturnMapSampler:
    """Samples the return map on a geometric grid, skipping failed points."""

    def __init__(self, config: dict):
        self.config = config
        settings = config.get('returnmap', {})
        self.x0_min = settings.get('x0_min', 1e-3)
        self.x0_max = settings.get('x0_max', 1e-1)
        self.samples = settings.get('samples', 24)
        self.show_progress = config.get('output', {}).get('progress', True)

    def sample(self, field: PolarField, side: str = POSITIVE,
               x0_values: Optional[np.ndarray] = None) -> ReturnMapTable:
        if x0_values is None:
            x0_values = geometric_grid(self.x0_min, self.x0_max, self.samples)
        x0_values = np.abs(np.asarray(x0_values, dtype=float))
        if side == NEGATIVE:
            x0_values = -x0_values

        rows, failures = [], []
        for x0 in tqdm(x0_values, desc=f"Return map ({side})", disable=not self.show_progress):
            try:
                P, d = return_map(field, float(x0))
            except AnalysisError as e:
                logger.warning(f"Return map failed at x0={x0:.6e}: {e}")
                failures.append(float(x0))
                continue
            rows.append({'x0': float(x0), 'P': P, 'd': d})

        logger.info(f"Sampled {len(rows)} return-map points ({len(failures)} failures)")
        return ReturnMapTable(
            samples=pd.DataFrame(rows, columns=['x0', 'P', 'd']),
            direction=side,
            stats=field.stats.to_dict(),
            failures=failures,
        )
