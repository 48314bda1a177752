"""
Focal Fitting Module - estimating v_j from sampled displacements.

d(x0) = sum_j v_j x0^j is fitted by column-scaled ordinary least squares
(statsmodels OLS, which also supplies standard errors and conditioning); a
Richardson extrapolation of d(x0)/x0^p to x0 -> 0 cross-checks the leading
coefficient.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import statsmodels.api as sm

from src.errors import IllConditionedFit
from src.poincare.return_map import ReturnMapTable

logger = logging.getLogger(__name__)

DEFAULT_CONDITION_LIMIT = 1e12


@dataclass
class FittedFocal:
    """Least-squares estimates v_1..v_J with their diagnostics."""
    v: List[float]
    stderr: List[float]
    residual: float
    condition: float
    ill_conditioned: bool = False
    powers: List[int] = field(default_factory=list)

    def coefficient(self, j: int) -> float:
        """v_j, zero when the power was not fitted."""
        return self.v[self.powers.index(j)] if j in self.powers else 0.0

    def error(self, j: int) -> float:
        return self.stderr[self.powers.index(j)] if j in self.powers else 0.0

    def leading(self, threshold: float) -> Optional[int]:
        """Lowest power whose estimate exceeds `threshold` and its own standard error."""
        for j, v, e in zip(self.powers, self.v, self.stderr):
            if abs(v) > max(threshold, 3.0 * e):
                return j
        return None

    def to_dict(self) -> Dict:
        return {
            'powers': list(self.powers),
            'v': list(self.v),
            'stderr': list(self.stderr),
            'residual': self.residual,
            'condition': self.condition,
            'ill_conditioned': self.ill_conditioned,
        }


def _solve_scaled(x: np.ndarray, d: np.ndarray, powers: Sequence[int]) -> Tuple[np.ndarray, np.ndarray, float, float]:
    design = np.column_stack([x ** p for p in powers])
    norms = np.linalg.norm(design, axis=0)
    norms[norms == 0] = 1.0
    scaled = design / norms

    result = sm.OLS(d, scaled).fit()
    residual = float(np.sqrt(max(result.ssr, 0.0)))
    condition = float(result.condition_number)
    if not np.isfinite(condition):
        condition = np.inf

    if result.df_resid > 0:
        stderr = np.nan_to_num(np.asarray(result.bse, dtype=float)) / norms
    else:
        stderr = np.zeros(len(powers))
    return np.asarray(result.params, dtype=float) / norms, stderr, residual, condition


def fit_focal(table: ReturnMapTable, J: int,
              condition_limit: float = DEFAULT_CONDITION_LIMIT,
              strict: bool = False,
              powers: Optional[Sequence[int]] = None) -> FittedFocal:
    """
    Fit d(x0) against x0^1..x0^J.

    Conditioning above `condition_limit` is logged and flagged; with
    strict=True it raises IllConditionedFit instead.
    """
    powers = list(range(1, J + 1)) if powers is None else list(powers)
    if len(table) < 2 * len(powers):
        raise ValueError(f"need at least {2 * len(powers)} samples for J={len(powers)}, got {len(table)}")

    v, stderr, residual, condition = _solve_scaled(table.x0, table.d, powers)

    ill = condition > condition_limit
    if ill:
        message = f"fit condition number {condition:.3e} exceeds {condition_limit:.1e}"
        if strict:
            raise IllConditionedFit(message)
        logger.warning(message)

    logger.debug(f"Fitted {len(powers)} focal values on {len(table)} samples, residual {residual:.3e}")
    return FittedFocal(
        v=[float(c) for c in v],
        stderr=[float(e) for e in stderr],
        residual=residual,
        condition=condition,
        ill_conditioned=ill,
        powers=powers,
    )


class FocalFitter:
    """fit_focal with settings from the `fitting` config section."""

    def __init__(self, config: dict):
        settings = config.get('fitting', {})
        self.J = settings.get('J', 8)
        self.condition_limit = settings.get('condition_limit', DEFAULT_CONDITION_LIMIT)
        self.strict = settings.get('strict', False)

    def fit(self, table: ReturnMapTable, J: Optional[int] = None) -> FittedFocal:
        J = self.J if J is None else J
        J = min(J, len(table) // 2)
        return fit_focal(table, J, self.condition_limit, self.strict)


def richardson_leading(table: ReturnMapTable, power: int, levels: int = 4) -> Tuple[float, float]:
    """
    Extrapolate d(x0)/x0^power to x0 = 0 by Neville's scheme on the
    `levels` smallest samples; returns (estimate, error estimate).
    """
    x = np.asarray(table.x0, dtype=float)
    order = np.argsort(np.abs(x))[:max(levels, 2)]
    x = x[order][::-1]
    q = table.d[order][::-1] / x ** power

    tableau = [list(q)]
    for k in range(1, len(x)):
        previous = tableau[-1]
        row = [
            (x[i] * previous[i - 1] - x[i - k] * previous[i]) / (x[i] - x[i - k])
            for i in range(k, len(x))
        ]
        # keep row indices aligned with x
        tableau.append([np.nan] * k + row)

    estimate = float(tableau[-1][-1])
    error = float(abs(tableau[-1][-1] - tableau[-2][-1]))
    return estimate, error
