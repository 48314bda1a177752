"""
Focal Analyzer Module - config-driven wrapper around the exact pipeline.
"""

import logging
from typing import Tuple

from src.errors import ConfigError
from src.series import DEFAULT_ORDER
from src.systems import LIENARD, PlanarSystem, classify_nilpotent, extract_fg, NilpotentClass
from src.focal.lienard import FocalReport, LienardData, build_lienard, focal_B

logger = logging.getLogger(__name__)


class FocalAnalyzer:
    """Classifies the origin and computes B_j, escalating the order on request."""

    def __init__(self, config: dict):
        self.config = config
        series = config.get('series', {})
        self.order = series.get('order', DEFAULT_ORDER)
        self.max_order = series.get('max_order', 4 * DEFAULT_ORDER)
        self.escalate = config.get('focal', {}).get('escalate_order', False)

    def classify(self, system: PlanarSystem) -> NilpotentClass:
        g, f = extract_fg(system)
        return classify_nilpotent(g, f)

    def analyze(self, system: PlanarSystem) -> Tuple[NilpotentClass, LienardData, FocalReport]:
        """
        Exact focal coefficients of a lienard-kind system.

        With escalate_order set, an all-zero B list is recomputed at twice the
        series order until max_order is reached.
        """
        if system.kind != LIENARD:
            raise ConfigError("exact focal values need a lienard-kind system; use returnmap/fit for general systems")

        order = system.series_order
        while True:
            g, f = extract_fg(system)
            nilpotent = classify_nilpotent(g, f)
            data = build_lienard(g, f)
            report = focal_B(data)

            if not (self.escalate and report.is_center) or 2 * order > self.max_order:
                break
            order *= 2
            logger.info(f"All B_j vanish; escalating series order to {order}")
            system = system.with_order(order)

        if not nilpotent.monodromic:
            report.diagnostics.append("origin not monodromic")
            logger.warning(f"Origin is not monodromic (a={nilpotent.a}, b={nilpotent.b})")

        logger.info(
            f"Focal values: n={report.n}, first odd B index {report.first_odd_nonzero}, "
            f"{report.stability.value}"
        )
        return nilpotent, data, report
