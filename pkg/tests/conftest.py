# tests/conftest.py

import json
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.core.settings import LabSettings  # noqa: E402
from src.phase_space import PhaseSpace  # noqa: E402
from src.systems import BowenParams  # noqa: E402
from src.transport import EmpiricalMeasure  # noqa: E402

GOLDEN = (5 ** 0.5 - 1) / 2


# Settings fixtures
@pytest.fixture
def settings():
    """Built-in lab settings, independent of configs/ergolab.yaml"""
    return LabSettings()


@pytest.fixture
def small_settings():
    """Settings with a coarse grid and small samples for fast CLI runs"""
    return LabSettings.model_validate({
        'transport': {'mesh': 1.0 / 512, 'atom_cap': 64},
        'diagnostics': {'sample_size': 8},
    })


# Space fixtures
@pytest.fixture
def interval():
    return PhaseSpace.unit_interval()


@pytest.fixture
def circle():
    return PhaseSpace.circle()


@pytest.fixture
def annulus():
    return PhaseSpace.annulus()


@pytest.fixture
def shift():
    return PhaseSpace.binary_shift(8)


# Test data generators
@pytest.fixture
def rng():
    """Seeded generator so every test draw is reproducible"""
    return np.random.default_rng(12345)


@pytest.fixture
def random_measure(rng):
    """Factory for random finitely supported measures on a space"""
    def make(space, size):
        if space.kind.value == 'annulus':
            points = [tuple(p) for p in rng.random((size, 2))]
        elif space.kind.value == 'binary_shift':
            points = [''.join(str(b) for b in rng.integers(0, 2, space.depth)) for _ in range(size)]
        else:
            points = rng.random(size).tolist()
        weights = rng.random(size) + 0.05
        return EmpiricalMeasure.from_atoms(space, points, (weights / weights.sum()).tolist())
    return make


@pytest.fixture
def gaunersdorfer_params():
    """Bowen cycle with lam = sigma = 2, limits 2/3 and 1/3"""
    return BowenParams(alpha_plus=1.0, alpha_minus=2.0, beta_plus=1.0, beta_minus=2.0)


# Run directory fixtures
@pytest.fixture
def write_config(tmp_path):
    """Write a config mapping to a JSON file and return its path"""
    def write(data, name='config.json'):
        path = tmp_path / name
        path.write_text(json.dumps(data, indent=2))
        return path
    return write


@pytest.fixture
def runs_dir(tmp_path):
    path = tmp_path / 'runs'
    path.mkdir()
    return path


# Test markers
def pytest_configure(config):
    config.addinivalue_line("markers", "integration: mark test as integration test")
    config.addinivalue_line("markers", "performance: mark test as performance test")
    config.addinivalue_line("markers", "slow: mark test as slow running")
