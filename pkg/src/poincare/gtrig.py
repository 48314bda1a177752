"""
Generalized Trigonometric Module - Cs/Sn functions and their period.

(Cs(t), Sn(t)) solves x' = y, y' = -x^(2n-1) from (1, 0). The energy
x^(2n)/(2n) + y^2/2 is conserved, so Cs^(2n) + n Sn^2 = 1.
"""

import logging
import math
from typing import Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import gamma

logger = logging.getLogger(__name__)

RTOL = 1e-12
ATOL = 1e-14


def _cs_sn_rhs(n: int):
    power = 2 * n - 1

    def rhs(t, z):
        return [z[1], -z[0] ** power]

    return rhs


def cs_sn(n: int, t: Union[float, np.ndarray],
          rtol: float = RTOL, atol: float = ATOL) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cs and Sn at time(s) t >= 0.

    Scalar t returns floats; an array returns arrays in the same order.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")

    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(times < 0):
        raise ValueError("cs_sn is integrated forward from t = 0")

    t_end = float(times.max())
    if t_end == 0.0:
        cs, sn = np.ones_like(times), np.zeros_like(times)
    else:
        order = np.argsort(times)
        sol = solve_ivp(
            _cs_sn_rhs(n), (0.0, t_end), [1.0, 0.0], method='DOP853',
            t_eval=times[order], rtol=rtol, atol=atol,
        )
        if not sol.success:
            raise RuntimeError(f"Cs/Sn integration failed: {sol.message}")
        cs, sn = np.empty_like(times), np.empty_like(times)
        cs[order], sn[order] = sol.y[0], sol.y[1]

    if np.ndim(t) == 0:
        return float(cs[0]), float(sn[0])
    return cs, sn


def energy_defect(n: int, cs: np.ndarray, sn: np.ndarray) -> np.ndarray:
    """|Cs^(2n) + n Sn^2 - 1|."""
    return np.abs(np.asarray(cs) ** (2 * n) + n * np.asarray(sn) ** 2 - 1.0)


def period_T(n: int) -> float:
    """T = 2 sqrt(pi/n) Gamma(1/2n) / Gamma((n+1)/2n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return float(2.0 * math.sqrt(math.pi / n) * gamma(1.0 / (2 * n)) / gamma((n + 1.0) / (2 * n)))


def measured_period(n: int, rtol: float = RTOL, atol: float = ATOL) -> float:
    """
    First return time of (Cs, Sn) to (1, 0), found by event location.

    The orbit reaches (-1, 0) with y increasing after half a period and
    (1, 0) with y decreasing after a full one.
    """
    rhs = _cs_sn_rhs(n)
    horizon = 2.0 * period_T(n)

    def upward(t, z):
        return z[1]
    upward.terminal = True
    upward.direction = 1

    def downward(t, z):
        return z[1]
    downward.terminal = True
    downward.direction = -1

    first = solve_ivp(rhs, (0.0, horizon), [1.0, 0.0], method='DOP853',
                      events=upward, rtol=rtol, atol=atol)
    if first.status != 1:
        raise RuntimeError("no half-period crossing found")
    t_half = float(first.t_events[0][0])
    z_half = first.y_events[0][0]

    second = solve_ivp(rhs, (t_half, t_half + horizon), z_half, method='DOP853',
                       events=downward, rtol=rtol, atol=atol)
    if second.status != 1:
        raise RuntimeError("no full-period crossing found")
    return float(second.t_events[0][0])


def first_return_derivative(n: int, b: float) -> float:
    """
    P'(0) = exp(-2 b pi / (n sqrt(4n - b^2))) for the normal form
    y' = -x^(2n-1) - y (b x^(n-1) + ...) with n odd and b the leading
    damping coefficient.
    """
    if b * b >= 4 * n:
        raise ValueError(f"need b^2 < 4n for a monodromic point, got b={b}, n={n}")
    return math.exp(-2.0 * b * math.pi / (n * math.sqrt(4 * n - b * b)))
