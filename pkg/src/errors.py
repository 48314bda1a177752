"""
Typed errors raised by the nilcycle library.

InputError subclasses map to CLI exit code 2; everything else is an
AnalysisError raised by the exact or numerical engines.
"""

from typing import Optional


class NilcycleError(Exception):
    """Base class for all library errors."""


class InputError(NilcycleError):
    """Problem with user-supplied input (files, configs, flags)."""


class ParseError(InputError):
    """Malformed PVF line."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class InvalidLowOrderTerms(InputError):
    """Constant or linear term where the normal form forbids one."""


class ConfigError(InputError):
    """Missing or inconsistent configuration / referenced files."""


class AnalysisError(NilcycleError):
    """Failure inside the exact or numerical pipeline."""


class DivisionBySingularSeries(AnalysisError):
    pass


class CompositionRequiresZeroConstant(AnalysisError):
    pass


class NotInvertibleAtOrigin(AnalysisError):
    pass


class RootBranchUndefined(AnalysisError):
    pass


class RootOfNonpositiveLeading(AnalysisError):
    pass


class ScaleTagMismatch(AnalysisError):
    """Two series carry incompatible irrational scale factors."""


class NotOddLeadingPower(AnalysisError):
    pass


class DegenerateLine(AnalysisError):
    pass


class HypothesisViolation(AnalysisError):
    """A structural hypothesis on g or f fails for the given data."""

    def __init__(self, hypothesis: str, message: str):
        self.hypothesis = hypothesis
        super().__init__(f"[{hypothesis}] {message}")


class DenominatorNearZero(AnalysisError):
    """The polar clock stalls: r is outside the monodromic annulus."""

    def __init__(self, theta: float, r: float, value: float):
        self.theta = theta
        self.r = r
        self.value = value
        super().__init__(
            f"denominator {value:.3e} too small at theta={theta:.6f}, r={r:.6e}"
        )


class StepUnderflow(AnalysisError):
    pass


class IllConditionedFit(AnalysisError):
    pass


class UnachievableLadder(AnalysisError):
    pass
