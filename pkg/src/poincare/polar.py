"""
Polar Field Module - the return-map clock in generalized polar coordinates.

With v = y - F(x) and x = r cos(theta), v = r^n sin(theta):

    dr/dtheta = r (sin v' + r^(n-1) cos x') / (cos v' - n r^(n-1) sin x')

where v' = y' - F'(x) x'. Near a monodromic origin theta decreases
strictly, so theta serves as a global clock and one turn is theta: 0 -> -2pi.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import solve_ivp

from src.errors import DenominatorNearZero, StepUnderflow
from src.series import TruncatedSeries
from src.systems import PlanarSystem, section_curve, extract_fg, classify_nilpotent

logger = logging.getLogger(__name__)

DEFAULT_EPS_DEN = 1e-8
DEFAULT_RTOL = 1e-12
DEFAULT_ATOL = 1e-14
F_TAIL_TOLERANCE = 1e-16


@dataclass
class IntegrationStats:
    """Counters accumulated over integrate_r calls."""
    integrations: int = 0
    steps: int = 0
    evaluations: int = 0
    min_denominator_ratio: float = math.inf

    def to_dict(self) -> dict:
        return {
            'integrations': self.integrations,
            'steps': self.steps,
            'evaluations': self.evaluations,
            'min_denominator_ratio': self.min_denominator_ratio,
        }


@dataclass
class PolarField:
    """Float evaluation context for dr/dtheta around a nilpotent origin."""
    system: PlanarSystem
    F_section: TruncatedSeries
    n: int
    validity_radius: float = 0.5
    eps_den: float = DEFAULT_EPS_DEN
    rtol: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL
    method: str = 'DOP853'
    stats: IntegrationStats = field(default_factory=IntegrationStats)

    def __post_init__(self):
        self._X = self.system.X.to_matrix()
        self._Y = self.system.Y.to_matrix()
        self._F = self.F_section.to_floats()
        self._dF = npoly.polyder(self._F) if len(self._F) > 1 else np.zeros(1)
        self._has_X = not self.system.X.is_zero()
        self._has_F = bool(np.any(self._F))

    @classmethod
    def from_system(cls, system: PlanarSystem, config: Optional[dict] = None,
                    r_max: Optional[float] = None) -> 'PolarField':
        """
        Build the field, raising the series order until the last retained
        coefficient of F is negligible at r_max.
        """
        config = config or {}
        integrator = config.get('integrator', {})
        max_order = config.get('series', {}).get('max_order', 4 * system.series_order)
        r_max = r_max if r_max is not None else config.get('returnmap', {}).get('validity_radius', 0.5)

        F = section_curve(system)
        while F.residual_bound(r_max) > F_TAIL_TOLERANCE and 2 * system.series_order <= max_order:
            system = system.with_order(2 * system.series_order)
            logger.info(f"Section curve tail too large at r={r_max}; raising order to {system.series_order}")
            F = section_curve(system)
        if F.residual_bound(r_max) > F_TAIL_TOLERANCE:
            logger.warning(f"Section curve truncation error {F.residual_bound(r_max):.2e} at r={r_max}")

        g, f = extract_fg(system, F)
        n = classify_nilpotent(g, f).n

        return cls(
            system=system,
            F_section=F,
            n=n,
            validity_radius=r_max,
            eps_den=integrator.get('eps_den', DEFAULT_EPS_DEN),
            rtol=integrator.get('rtol', DEFAULT_RTOL),
            atol=integrator.get('atol', DEFAULT_ATOL),
            method=integrator.get('method', 'DOP853'),
        )

    def section_y(self, x: float) -> float:
        return float(npoly.polyval(x, self._F)) if self._has_F else 0.0

    def cartesian(self, x: float, y: float) -> Tuple[float, float]:
        """(x', y') of the normalized planar field."""
        dx = y + (float(npoly.polyval2d(x, y, self._X)) if self._has_X else 0.0)
        dy = float(npoly.polyval2d(x, y, self._Y))
        return dx, dy

    def rhs(self, theta: float, r: float) -> float:
        if r == 0.0:
            return 0.0
        c, s = math.cos(theta), math.sin(theta)
        n = self.n
        x = r * c
        y = self.section_y(x) + r ** n * s
        dx, dy = self.cartesian(x, y)
        dv = dy - (float(npoly.polyval(x, self._dF)) * dx if self._has_F else 0.0)

        rn1 = r ** (n - 1)
        numerator = s * dv + rn1 * c * dx
        denominator = c * dv - n * rn1 * s * dx

        # the denominator scales like r^(2n-1) near the origin
        scale = abs(r) ** (2 * n - 1)
        ratio = abs(denominator) / scale
        if ratio < self.stats.min_denominator_ratio:
            self.stats.min_denominator_ratio = ratio
        if ratio < self.eps_den:
            raise DenominatorNearZero(theta, r, denominator)
        return r * numerator / denominator


def polar_rhs(field: PolarField, theta: float, r: float) -> float:
    """dr/dtheta at (theta, r)."""
    return field.rhs(theta, r)


def integrate_r(field: PolarField, theta0: float, theta1: float, h: float) -> float:
    """r(theta1) for the solution with r(theta0) = h."""
    if abs(h) > field.validity_radius:
        raise ValueError(f"|h|={abs(h)} beyond validity radius {field.validity_radius}")
    if h == 0.0 or theta0 == theta1:
        return h

    sol = solve_ivp(
        lambda theta, r: [field.rhs(theta, r[0])],
        (theta0, theta1), [h],
        method=field.method, rtol=field.rtol, atol=field.atol,
    )
    field.stats.integrations += 1
    field.stats.steps += len(sol.t) - 1
    field.stats.evaluations += sol.nfev

    if sol.status == -1:
        raise StepUnderflow(f"integration from r={h} stalled at theta={sol.t[-1]:.6f}: {sol.message}")
    return float(sol.y[0, -1])
