"""
Forward-time simulation of the planar field in Cartesian coordinates.

Used to cross-check stability verdicts and to produce phase polylines for
plot data. Crossings of the section v = y - F(x) from above with x > 0 are
recorded by event location.
"""

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from src.poincare.gtrig import period_T
from src.poincare.polar import PolarField

logger = logging.getLogger(__name__)


@dataclass
class SectionCrossings:
    """Successive positive-side section crossings of one forward orbit."""
    x0: float
    crossings: List[float] = field(default_factory=list)
    trajectory: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=['t', 'x', 'y']))

    @property
    def contracts(self) -> bool:
        """True when the last recorded crossing lies closer to the origin than x0."""
        return bool(self.crossings) and self.crossings[-1] < self.x0

    def to_dict(self) -> dict:
        return {'x0': self.x0, 'crossings': list(self.crossings), 'contracts': self.contracts}


def simulate_section_crossings(field: PolarField, x0: float, turns: int = 3,
                               points_per_turn: int = 200, max_chunks: int = 50) -> SectionCrossings:
    """
    Integrate forward from (x0, F(x0)), x0 > 0, until `turns` positive-side
    crossings of y = F(x) are found.
    """
    if x0 <= 0:
        raise ValueError(f"x0 must be positive, got {x0}")

    # orbit time near the origin scales like T / (sqrt(a) x0^(n-1)); one chunk is a few turns
    chunk = 2.0 * period_T(field.n) / max(x0 ** (field.n - 1), 1e-12)

    def rhs(t, z):
        return list(field.cartesian(z[0], z[1]))

    def section(t, z):
        return z[1] - field.section_y(z[0])
    section.direction = -1

    state = np.array([x0, field.section_y(x0)])
    t0 = 0.0
    crossings: List[float] = []
    pieces = []

    for _ in range(max_chunks):
        t_eval = np.linspace(t0, t0 + chunk, points_per_turn)
        sol = solve_ivp(rhs, (t0, t0 + chunk), state, method=field.method, t_eval=t_eval,
                        events=section, rtol=field.rtol * 100, atol=field.atol * 100)
        if not sol.success:
            logger.warning(f"Forward simulation from x0={x0:.6e} stopped: {sol.message}")
            break
        pieces.append(pd.DataFrame({'t': sol.t, 'x': sol.y[0], 'y': sol.y[1]}))

        for t_event, z_event in zip(sol.t_events[0], sol.y_events[0]):
            # the start point sits on the section
            if t_event - t0 < 1e-9 * chunk and t0 == 0.0:
                continue
            if z_event[0] > 0:
                crossings.append(float(z_event[0]))

        state = sol.y[:, -1]
        t0 = float(sol.t[-1])
        if len(crossings) >= turns:
            break

    trajectory = pd.concat(pieces, ignore_index=True) if pieces else pd.DataFrame(columns=['t', 'x', 'y'])
    return SectionCrossings(x0=x0, crossings=crossings[:turns], trajectory=trajectory)
