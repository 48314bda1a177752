"""
Shared fixtures: a quiet config, the committed system files and a few
inline PVF documents.
"""

from pathlib import Path

import pytest

from src.systems import load_family, parse_family

ROOT = Path(__file__).resolve().parent.parent
SYSTEMS = ROOT / "systems"
CONFIGS = ROOT / "configs"


KUKLES_CENTER_PVF = """\
kind general
label kukles-center
Y 1 1 -1
Y 3 0 -1
Y 1 2 -1/2
"""

QUINTIC_PVF = """\
kind lienard
label quintic
param b0 0
param b2 0
param b4 0
param b6 0
g 3 1
g 5 1
f 0 b0
f 2 b2
f 4 b4
f 6 b6
"""

ORACLE_PVF = """\
kind lienard
g 5 1
f 2 1
"""


@pytest.fixture
def config():
    return {
        'series': {'order': 40, 'max_order': 160},
        'integrator': {'method': 'DOP853', 'rtol': 1e-12, 'atol': 1e-14, 'eps_den': 1e-8},
        'returnmap': {'x0_min': 1e-3, 'x0_max': 1e-1, 'samples': 24, 'validity_radius': 0.5},
        'fitting': {'J': 8, 'condition_limit': 1e12, 'strict': False},
        'cycles': {'r_min': 1e-3, 'r_max': 0.2, 'grid': 40, 'xtol': 1e-10,
                   'pair_tol': 1e-6, 'noise_floor': 1e-9},
        'experiments': {'seed': 20240917, 'systems_dir': str(SYSTEMS)},
        'output': {'progress': False},
    }


@pytest.fixture
def quintic_family():
    return parse_family(QUINTIC_PVF)


@pytest.fixture
def kukles_family():
    return load_family(SYSTEMS / "kukles.pvf")


@pytest.fixture
def kukles_center_family():
    return parse_family(KUKLES_CENTER_PVF)


@pytest.fixture
def oracle_family():
    return parse_family(ORACLE_PVF)
