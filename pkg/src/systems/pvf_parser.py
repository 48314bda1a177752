"""
PVF Parser Module - line-based planar vector field descriptions.

Format (UTF-8, one directive per line, '#' starts a comment):

    kind general|lienard          first directive
    orientation +1|-1             optional, default +1
    order N                       optional series order
    label some free text          optional
    param a11 1/2                 named rational with its default value
    X i j c  /  Y i j c           general kind: coefficient of x^i y^j
    g j c    /  f j c             lienard kind: coefficient of x^j

A coefficient c is an exact rational 'p' or 'p/q', a parameter name, or
'p/q*name'. Repeated exponent lines accumulate.
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from src.errors import ConfigError, InvalidLowOrderTerms, ParseError
from src.series import BivariateTruncated, TruncatedSeries, DEFAULT_ORDER, as_rational, parse_rational
from src.systems.planar import GENERAL, LIENARD, PlanarSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TermLine:
    """One accumulated coefficient line: constant * parameter (or constant alone)."""
    target: str
    i: int
    j: int
    constant: Fraction
    parameter: Optional[str] = None
    line_number: int = 0

    def value(self, parameters: Mapping[str, Fraction]) -> Fraction:
        if self.parameter is None:
            return self.constant
        return self.constant * parameters[self.parameter]


@dataclass
class SystemFamily:
    """A parsed PVF document whose coefficients may depend linearly on named parameters."""
    kind: str
    orientation: int = 1
    order: int = DEFAULT_ORDER
    label: str = ""
    defaults: Dict[str, Fraction] = field(default_factory=dict)
    terms: List[TermLine] = field(default_factory=list)

    @property
    def parameter_names(self) -> List[str]:
        return list(self.defaults)

    def resolve(self, values: Optional[Mapping[str, object]] = None) -> Dict[str, Fraction]:
        """Defaults overridden by `values`; unknown names are rejected."""
        resolved = dict(self.defaults)
        for name, value in (values or {}).items():
            if name not in resolved:
                raise ConfigError(f"unknown parameter '{name}' (declared: {', '.join(self.defaults) or 'none'})")
            try:
                resolved[name] = as_rational(value)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"parameter '{name}': {e}") from e
        return resolved

    def _collect(self, parameters: Mapping[str, Fraction],
                 only: Optional[str] = None) -> Dict[str, Dict[Tuple[int, int], Fraction]]:
        collected: Dict[str, Dict[Tuple[int, int], Fraction]] = {}
        for term in self.terms:
            if only is not None and term.parameter != only:
                continue
            bucket = collected.setdefault(term.target, {})
            key = (term.i, term.j)
            bucket[key] = bucket.get(key, Fraction(0)) + term.value(parameters)
        return collected

    def _build(self, collected, parameters: Dict[str, Fraction], order: int) -> PlanarSystem:
        if self.kind == LIENARD:
            g_terms = {i: c for (i, _), c in collected.get('g', {}).items()}
            f_terms = {i: c for (i, _), c in collected.get('f', {}).items()}
            top = max(list(g_terms) + [j + 1 for j in f_terms] + [order])
            return PlanarSystem.lienard(
                TruncatedSeries.from_terms(g_terms, top),
                TruncatedSeries.from_terms(f_terms, top - 1),
                orientation=self.orientation, series_order=order,
                label=self.label, parameters=parameters,
            )

        top = max([i + j for bucket in collected.values() for i, j in bucket] + [order])
        return PlanarSystem.general(
            BivariateTruncated(collected.get('X', {}), top),
            BivariateTruncated(collected.get('Y', {}), top),
            orientation=self.orientation, series_order=order,
            label=self.label, parameters=parameters,
        )

    def instantiate(self, values: Optional[Mapping[str, object]] = None,
                    order: Optional[int] = None) -> PlanarSystem:
        """Resolve every parameter and build the PlanarSystem."""
        parameters = self.resolve(values)
        order = self.order if order is None else order
        return self._build(self._collect(parameters), parameters, order)

    def direction(self, name: str, order: Optional[int] = None) -> PlanarSystem:
        """
        The system formed by the terms multiplying `name` alone, with the
        parameter set to 1; the family is affine in each parameter, so this
        is the partial derivative of the field with respect to it.
        """
        if name not in self.defaults:
            raise ConfigError(f"unknown parameter '{name}'")
        parameters = {key: Fraction(1) for key in self.defaults}
        order = self.order if order is None else order
        return self._build(self._collect(parameters, only=name), {name: Fraction(1)}, order)

    def targets_of(self, name: str) -> List[str]:
        """Which of X, Y, g, f the parameter enters."""
        return sorted({t.target for t in self.terms if t.parameter == name})


class PVFParser:
    """Line parser for PVF documents with the usual warn-and-count bookkeeping."""

    DIRECTIVE_PATTERN = re.compile(r'^(kind|orientation|order|label|param)\s+(.+)$')
    GENERAL_TERM_PATTERN = re.compile(r'^([XY])\s+(\d+)\s+(\d+)\s+(\S+)$')
    LIENARD_TERM_PATTERN = re.compile(r'^([gf])\s+(\d+)\s+(\S+)$')
    # 'p/q*name', 'name', '-name'
    PARAMETRIC_PATTERN = re.compile(r'^(?:([+-]?\d+(?:/[+-]?\d+)?)\*)?([+-]?)([A-Za-z_]\w*)$')
    NAME_PATTERN = re.compile(r'^[A-Za-z_]\w*$')

    def __init__(self, config: Optional[dict] = None):
        self.config = config or {}
        self.default_order = self.config.get('series', {}).get('order', DEFAULT_ORDER)

        self.lines_read = 0
        self.terms_read = 0
        self.comments_skipped = 0

    def parse_file(self, filepath: str | Path) -> SystemFamily:
        """Parse a .pvf file from disk."""
        filepath = Path(filepath)
        if not filepath.exists():
            raise ConfigError(f"system file not found: {filepath}")
        with open(filepath, 'r', encoding='utf-8') as f:
            family = self.parse_lines(f)
        if not family.label:
            family.label = filepath.stem
        return family

    def parse_text(self, text: str) -> SystemFamily:
        return self.parse_lines(text.splitlines())

    def parse_lines(self, lines: Iterable[str]) -> SystemFamily:
        family: Optional[SystemFamily] = None
        seen_orientation = seen_order = False

        for line_number, raw in enumerate(lines, start=1):
            self.lines_read += 1
            line = raw.split('#', 1)[0].strip()
            if not line:
                if raw.strip():
                    self.comments_skipped += 1
                continue

            directive = self.DIRECTIVE_PATTERN.match(line)
            if family is None:
                if not directive or directive.group(1) != 'kind':
                    raise ParseError("document must start with 'kind general|lienard'", line_number)
                kind = directive.group(2).strip()
                if kind not in (GENERAL, LIENARD):
                    raise ParseError(f"unknown kind '{kind}'", line_number)
                family = SystemFamily(kind=kind, order=self.default_order)
                continue

            if directive:
                key, value = directive.group(1), directive.group(2).strip()
                if key == 'kind':
                    raise ParseError("duplicate 'kind' directive", line_number)
                elif key == 'orientation':
                    if seen_orientation:
                        raise ParseError("duplicate 'orientation' directive", line_number)
                    family.orientation = self._parse_orientation(value, line_number)
                    seen_orientation = True
                elif key == 'order':
                    if seen_order:
                        raise ParseError("duplicate 'order' directive", line_number)
                    family.order = self._parse_order(value, line_number)
                    seen_order = True
                elif key == 'label':
                    family.label = value
                else:
                    self._parse_param(family, value, line_number)
                continue

            family.terms.append(self._parse_term(family, line, line_number))
            self.terms_read += 1

        if family is None:
            raise ParseError("empty document: missing 'kind' directive", 1)

        logger.debug(
            f"Parsed {family.kind} system: {self.terms_read} terms, "
            f"{len(family.defaults)} parameters, order {family.order}"
        )
        return family

    def _parse_orientation(self, value: str, line_number: int) -> int:
        if value in ('+1', '1'):
            return 1
        if value == '-1':
            return -1
        raise ParseError(f"orientation must be +1 or -1, got '{value}'", line_number)

    def _parse_order(self, value: str, line_number: int) -> int:
        if not value.isdigit() or int(value) < 2:
            raise ParseError(f"order must be an integer >= 2, got '{value}'", line_number)
        return int(value)

    def _parse_param(self, family: SystemFamily, value: str, line_number: int):
        parts = value.split()
        if len(parts) != 2 or not self.NAME_PATTERN.match(parts[0]):
            raise ParseError(f"expected 'param <name> <p/q>', got 'param {value}'", line_number)
        name = parts[0]
        if name in family.defaults:
            raise ParseError(f"parameter '{name}' declared twice", line_number)
        family.defaults[name] = self._rational(parts[1], line_number)

    def _rational(self, token: str, line_number: int) -> Fraction:
        try:
            return parse_rational(token)
        except ValueError as e:
            raise ParseError(str(e), line_number) from e

    def _coefficient(self, family: SystemFamily, token: str,
                     line_number: int) -> Tuple[Fraction, Optional[str]]:
        match = self.PARAMETRIC_PATTERN.match(token)
        if not match:
            return self._rational(token, line_number), None

        factor = self._rational(match.group(1), line_number) if match.group(1) else Fraction(1)
        if match.group(2) == '-':
            factor = -factor
        name = match.group(3)
        if name not in family.defaults:
            raise ParseError(f"parameter '{name}' used before its 'param' declaration", line_number)
        return factor, name

    def _parse_term(self, family: SystemFamily, line: str, line_number: int) -> TermLine:
        if family.kind == GENERAL:
            match = self.GENERAL_TERM_PATTERN.match(line)
            if not match:
                raise ParseError(f"expected 'X|Y <i> <j> <coefficient>', got '{line}'", line_number)
            target, i, j, token = match.group(1), int(match.group(2)), int(match.group(3)), match.group(4)
        else:
            match = self.LIENARD_TERM_PATTERN.match(line)
            if not match:
                raise ParseError(f"expected 'g|f <j> <coefficient>', got '{line}'", line_number)
            target, i, j, token = match.group(1), int(match.group(2)), 0, match.group(3)

        constant, parameter = self._coefficient(family, token, line_number)
        if constant != 0:
            self._check_low_order(family.kind, target, i, j, line_number)
        return TermLine(target, i, j, constant, parameter, line_number)

    @staticmethod
    def _check_low_order(kind: str, target: str, i: int, j: int, line_number: int):
        """
        X and Y start at degree 2. A linear y term in y' (f(0) for lienard
        kind) is tolerated: it is the damping of the node regime.
        """
        if kind == LIENARD:
            if target == 'g' and i <= 1:
                raise InvalidLowOrderTerms(f"line {line_number}: g must start at degree >= 2, got x^{i}")
            return
        degree = i + j
        if degree == 0 or (degree == 1 and not (target == 'Y' and j == 1)):
            raise InvalidLowOrderTerms(
                f"line {line_number}: {target} term x^{i} y^{j} has degree {degree}"
            )


def parse_family(text: str, config: Optional[dict] = None) -> SystemFamily:
    """Parse PVF text into a SystemFamily."""
    return PVFParser(config).parse_text(text)


def parse_system(text: str, config: Optional[dict] = None) -> PlanarSystem:
    """Parse PVF text and resolve every parameter at its default value."""
    return parse_family(text, config).instantiate()


def load_family(path: str | Path, config: Optional[dict] = None) -> SystemFamily:
    return PVFParser(config).parse_file(path)
