#!/usr/bin/env python3
"""
nilcycle - Nilpotent Center-Focus Pipeline

Classifies nilpotent singular points, computes exact focal coefficients of
Lienard-form systems, samples return maps numerically and counts the small
limit cycles produced by alternating unfoldings.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd
import yaml
from tqdm import tqdm

from src.bifurcation import ExperimentReport, ExperimentRunner, canonical_id, emit_all, read_yaml, unfold
from src.errors import AnalysisError, ConfigError, InputError
from src.focal import FocalAnalyzer
from src.poincare import (
    NEGATIVE,
    POSITIVE,
    CycleCounter,
    FocalFitter,
    PolarField,
    ReturnMapSampler,
    richardson_leading,
    simulate_section_crossings,
)
from src.systems import LIENARD, SystemFamily, load_family

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CRITERION_FAILED = 1
EXIT_INPUT_ERROR = 2


def load_config(config_path: str = "config.yaml", required: bool = False) -> dict:
    """Load configuration from YAML file; a missing default file gives an empty config."""
    path = Path(config_path)
    if not path.exists():
        if required:
            raise ConfigError(f"config file not found: {path}")
        logger.warning(f"Config file {path} not found, using built-in defaults")
        return {}
    with open(path, 'r') as f:
        return yaml.safe_load(f) or {}


def parse_assignments(items: Optional[List[str]]) -> dict:
    """'name=p/q' pairs from repeated --set flags."""
    values = {}
    for item in items or []:
        if '=' not in item:
            raise ConfigError(f"--set expects name=value, got '{item}'")
        name, value = item.split('=', 1)
        values[name.strip()] = value.strip()
    return values


def open_family(config: dict, path: str, order: Optional[int] = None) -> SystemFamily:
    family = load_family(path, config)
    if order is not None:
        family.order = order
    return family


def default_config(config: dict, section: str, key: str, default):
    return config.get(section, {}).get(key, default)


def run_classify(config: dict, path: str, assignments: dict, order: Optional[int]) -> ExperimentReport:
    """Monodromy classification of the origin."""
    logger.info("=== Classification ===")
    family = open_family(config, path, order)
    system = family.instantiate(assignments)
    nilpotent = FocalAnalyzer(config).classify(system)

    logger.info(f"  - n = {nilpotent.n}, a = {nilpotent.a}, b = {nilpotent.b}")
    logger.info(f"  - Monodromic: {nilpotent.monodromic}")
    return ExperimentReport('classify', inputs={
        'system': family.label, 'parameters': system.parameters, 'order': system.series_order,
        'orientation_flipped': system.metadata.get('orientation_flipped', False),
    }, results={'classification': nilpotent})


def run_focal(config: dict, path: str, assignments: dict, order: Optional[int]) -> ExperimentReport:
    """Exact B_j for lienard systems, fitted v_j for general ones."""
    logger.info("=== Focal values ===")
    family = open_family(config, path, order)
    system = family.instantiate(assignments)
    report = ExperimentReport('focal', inputs={
        'system': family.label, 'parameters': system.parameters, 'order': system.series_order,
        'orientation_flipped': system.metadata.get('orientation_flipped', False),
    })

    if system.kind == LIENARD:
        nilpotent, _, focal = FocalAnalyzer(config).analyze(system)
        report.results['classification'] = nilpotent
        report.focal['system'] = focal
        return report

    logger.info("General-kind system: fitting focal values from the return map")
    x0_max = default_config(config, 'returnmap', 'x0_max', 1e-1)
    field = PolarField.from_system(system, config, r_max=1.25 * x0_max)
    table = ReturnMapSampler(config).sample(field, POSITIVE)
    fit = FocalFitter(config).fit(table)
    lead = fit.leading(default_config(config, 'fitting', 'threshold', 1e-8))
    report.tables['returnmap_positive'] = table.samples
    report.results['fit'] = fit
    report.results['classification'] = FocalAnalyzer(config).classify(system)
    if lead is not None:
        estimate, error = richardson_leading(table, lead)
        report.results['leading'] = {'power': lead, 'fitted': fit.coefficient(lead),
                                     'extrapolated': estimate, 'extrapolation_error': error}
    return report


def run_returnmap(config: dict, path: str, assignments: dict, order: Optional[int],
                  x0_min: Optional[float], x0_max: Optional[float], samples: Optional[int],
                  side: str) -> ExperimentReport:
    """Return-map tables on one or both sides of the section."""
    logger.info("=== Return map ===")
    settings = config.setdefault('returnmap', {})
    for key, value in (('x0_min', x0_min), ('x0_max', x0_max), ('samples', samples)):
        if value is not None:
            settings[key] = value

    family = open_family(config, path, order)
    system = family.instantiate(assignments)
    x_max = settings.get('x0_max', 1e-1)
    field = PolarField.from_system(system, config, r_max=1.25 * x_max)
    sampler = ReturnMapSampler(config)

    report = ExperimentReport('returnmap', inputs={
        'system': family.label, 'parameters': system.parameters, 'side': side,
        'x0_min': sampler.x0_min, 'x0_max': sampler.x0_max, 'samples': sampler.samples,
    })
    sides = {'pos': [POSITIVE], 'neg': [NEGATIVE], 'both': [POSITIVE, NEGATIVE]}[side]
    for direction in sides:
        table = sampler.sample(field, direction)
        name = 'positive' if direction == POSITIVE else 'negative'
        report.tables[f"returnmap_{name}"] = table.samples
        report.results[name] = table
    report.results['stats'] = field.stats
    return report


def run_cycles(config: dict, path: str, assignments: dict, order: Optional[int],
               r_max: Optional[float], grid: Optional[int]) -> ExperimentReport:
    """Count small limit cycles and trace one orbit through each."""
    logger.info("=== Limit cycles ===")
    counter = CycleCounter(config)
    r_max = counter.r_max if r_max is None else r_max
    family = open_family(config, path, order)
    system = family.instantiate(assignments)
    field = PolarField.from_system(system, config, r_max=r_max)
    cycles = counter.count(field, r_max=r_max, grid=grid)

    report = ExperimentReport('cycles', inputs={
        'system': family.label, 'parameters': system.parameters,
        'r_max': r_max, 'grid': grid or counter.grid,
    })
    report.cycles['system'] = cycles
    report.tables['grid'] = cycles.grid
    for i, root in enumerate(tqdm(cycles.roots, desc="Tracing cycles", disable=not counter.show_progress)):
        try:
            orbit = simulate_section_crossings(field, root, turns=1)
        except AnalysisError as e:
            logger.warning(f"Could not trace cycle {i} at x0={root:.6e}: {e}")
            continue
        report.trajectories[f"cycle_{i}"] = orbit.trajectory
    logger.info(f"Limit cycles: {cycles.count} ({cycles.confirmed} paired)")
    return report


def run_unfold(config: dict, path: str, order: Optional[int], k: int, eps: Optional[str],
               ratio: Optional[str], parameters: Optional[str]) -> ExperimentReport:
    """Parameter values realising an alternating ladder of B values."""
    logger.info("=== Unfolding ===")
    settings = config.get('unfolding', {})
    family = open_family(config, path, order)
    names = [p.strip() for p in parameters.split(',')] if parameters else None
    plan = unfold(
        family, k,
        eps if eps is not None else settings.get('eps', '1'),
        ratio if ratio is not None else settings.get('ratio', '1/20'),
        top_sign=settings.get('top_sign', -1),
        parameters=names,
        step=settings.get('jacobian_step', 1e-6),
        threshold=settings.get('rank_threshold', 1e-8),
    )
    report = ExperimentReport('unfold', inputs={
        'system': family.label, 'k': k, 'eps': plan.eps, 'ratio': plan.ratio,
    }, results={'plan': plan})
    if plan.ladder:
        _, _, focal = FocalAnalyzer(config).analyze(family.instantiate(plan.assignments))
        report.focal['unfolded'] = focal
    return report


def run_sweep(config: dict, path: str, assignments: dict, order: Optional[int],
              param: str, values: str) -> ExperimentReport:
    """Focal reports over a list of rational values of one parameter."""
    logger.info("=== Parameter sweep ===")
    family = open_family(config, path, order)
    analyzer = FocalAnalyzer(config)

    rows = []
    for value in tqdm([v.strip() for v in values.split(',') if v.strip()], desc=f"Sweeping {param}"):
        system = family.instantiate({**assignments, param: value})
        try:
            _, _, focal = analyzer.analyze(system)
        except AnalysisError as e:
            logger.warning(f"{param}={value}: {e}")
            rows.append({param: value, 'first_odd_nonzero': None, 'stability': 'error',
                         'focus_order': None, 'leading_B': None, 'order': system.series_order})
            continue
        rows.append({
            param: value,
            'first_odd_nonzero': focal.first_odd_nonzero,
            'stability': focal.stability.value,
            'focus_order': focal.focus_order,
            'leading_B': None if focal.leading_B is None else str(focal.leading_B),
            'order': focal.order,
        })

    report = ExperimentReport('sweep', inputs={'system': family.label, 'parameter': param})
    report.tables['sweep'] = pd.DataFrame(rows)
    report.results['points'] = rows
    return report


def run_experiment_command(config: dict, experiment_id: str, override_path: Optional[str]) -> ExperimentReport:
    overrides = None
    if override_path:
        overrides = read_yaml(override_path)
        # a single unfolding run file replaces the committed list
        if canonical_id(experiment_id) == 'prop4.3' and 'k' in overrides:
            overrides = {'unfoldings': [override_path]}
    return ExperimentRunner(config).run(experiment_id, overrides)


def add_system_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('file', help='Path to PVF system file')
    parser.add_argument('--set', action='append', metavar='NAME=VALUE',
                        help='Override a declared parameter (repeatable)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='nilcycle',
        description='Nilpotent center-focus and small limit cycle pipeline'
    )
    parser.add_argument('--config', '-c', default='config.yaml', help='Path to config file')
    parser.add_argument('--out', '-o', help='Output directory (default: output.dir from config)')
    parser.add_argument('--order', type=int, help='Series truncation order N')
    parser.add_argument('--quiet', '-q', action='store_true', help='Disable progress bars')

    subparsers = parser.add_subparsers(dest='command', help='Commands')

    classify_parser = subparsers.add_parser('classify', help='Classify the origin')
    add_system_arguments(classify_parser)

    focal_parser = subparsers.add_parser('focal', help='Focal values (exact or fitted)')
    add_system_arguments(focal_parser)

    returnmap_parser = subparsers.add_parser('returnmap', help='Sample the return map')
    add_system_arguments(returnmap_parser)
    returnmap_parser.add_argument('--x0-min', type=float, help='Smallest section point')
    returnmap_parser.add_argument('--x0-max', type=float, help='Largest section point')
    returnmap_parser.add_argument('--samples', type=int, help='Number of geometric samples')
    returnmap_parser.add_argument('--side', choices=['pos', 'neg', 'both'], default='pos')

    cycles_parser = subparsers.add_parser('cycles', help='Count small limit cycles')
    add_system_arguments(cycles_parser)
    cycles_parser.add_argument('--rmax', type=float, help='Outer radius of the search')
    cycles_parser.add_argument('--grid', type=int, help='Number of grid points')

    unfold_parser = subparsers.add_parser('unfold', help='Alternating unfolding ladder')
    unfold_parser.add_argument('file', help='Path to PVF system file')
    unfold_parser.add_argument('--k', type=int, default=1, help='Number of cycles to produce')
    unfold_parser.add_argument('--eps', help='Top ladder magnitude (rational)')
    unfold_parser.add_argument('--ratio', help='Ratio between rungs in (0, 1) (rational)')
    unfold_parser.add_argument('--params', help='Comma-separated parameters to solve for')

    experiment_parser = subparsers.add_parser('experiment', help='Run a committed experiment')
    experiment_parser.add_argument('id', help='prop4.1 | prop4.2 | prop4.3 | truncation | symmetry | selftest (aliases: kukles, cubic-focus, cycle-production)')
    experiment_parser.add_argument('--config', dest='experiment_config', help='Experiment override YAML')

    subparsers.add_parser('selftest', help='Run all invariant suites')

    sweep_parser = subparsers.add_parser('sweep', help='Focal values over parameter values')
    add_system_arguments(sweep_parser)
    sweep_parser.add_argument('--param', required=True, help='Parameter to vary')
    sweep_parser.add_argument('--values', required=True, help='Comma-separated rational values')

    return parser


def dispatch(config: dict, args: argparse.Namespace) -> ExperimentReport:
    assignments = parse_assignments(getattr(args, 'set', None))
    if args.command == 'classify':
        return run_classify(config, args.file, assignments, args.order)
    if args.command == 'focal':
        return run_focal(config, args.file, assignments, args.order)
    if args.command == 'returnmap':
        return run_returnmap(config, args.file, assignments, args.order,
                             args.x0_min, args.x0_max, args.samples, args.side)
    if args.command == 'cycles':
        return run_cycles(config, args.file, assignments, args.order, args.rmax, args.grid)
    if args.command == 'unfold':
        return run_unfold(config, args.file, args.order, args.k, args.eps, args.ratio, args.params)
    if args.command == 'experiment':
        return run_experiment_command(config, args.id, args.experiment_config)
    if args.command == 'selftest':
        return run_experiment_command(config, 'selftest', None)
    return run_sweep(config, args.file, assignments, args.order, args.param, args.values)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_OK

    try:
        config = load_config(args.config, required=args.config != 'config.yaml')
        if args.order is not None:
            config.setdefault('series', {})['order'] = args.order
        if args.quiet:
            config.setdefault('output', {})['progress'] = False

        report = dispatch(config, args)
        out_dir = args.out or default_config(config, 'output', 'dir', 'output')
        emit_all(report, out_dir, default_config(config, 'output', 'formats', None))
    except InputError as e:
        logger.error(f"Input error: {e}")
        return EXIT_INPUT_ERROR
    except ValueError as e:
        logger.error(f"Invalid argument: {e}")
        return EXIT_INPUT_ERROR
    except AnalysisError as e:
        logger.error(f"Analysis failed: {e}")
        return EXIT_CRITERION_FAILED

    if not report.passed:
        failed = [c.criterion for c in report.criteria if not c.passed]
        logger.error(f"Failed criteria: {', '.join(failed)}")
        return EXIT_CRITERION_FAILED

    logger.info(f"{report.experiment_id}: done")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
