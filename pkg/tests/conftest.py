"""
Pytest configuration and shared fixtures for the BREA simulator tests.
"""

import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

# Add the project root to path and handle src as a package
project_root = os.path.dirname(os.path.dirname(__file__))
sys.path.insert(0, project_root)

import src.cli as cli  # noqa: E402
import src.config as config  # noqa: E402
import src.errors as errors  # noqa: E402
import src.experiment as experiment  # noqa: E402
import src.field as field  # noqa: E402
import src.network as network  # noqa: E402
import src.protocol as protocol  # noqa: E402
import src.quantize as quantize  # noqa: E402
import src.rscode as rscode  # noqa: E402
import src.selection as selection  # noqa: E402
import src.trainer as trainer  # noqa: E402
import src.utils as utils  # noqa: E402
import src.vss as vss  # noqa: E402

# Make the modules available with their simple names for tests
for _name, _module in {
    "cli": cli,
    "config": config,
    "errors": errors,
    "experiment": experiment,
    "field": field,
    "network": network,
    "protocol": protocol,
    "quantize": quantize,
    "rscode": rscode,
    "selection": selection,
    "trainer": trainer,
    "utils": utils,
    "vss": vss,
}.items():
    sys.modules[_name] = _module


@pytest.fixture(scope="session")
def test_field():
    """The small field p=257 used for exhaustive checks."""
    return field.PrimeField(field.TEST_PRIME)


@pytest.fixture(scope="session")
def prod_field():
    """The 32-bit production field."""
    return field.PrimeField(field.DEFAULT_PRIME)


@pytest.fixture(scope="session")
def test_group(test_field):
    return field.find_commit_group(test_field)


@pytest.fixture(scope="session")
def prod_group(prod_field):
    return field.find_commit_group(prod_field)


@pytest.fixture
def rng():
    """A fresh seeded generator per test."""
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_round_config():
    """N=7, A=1, T=1, m=1 with exact verification: bound 2+1+max(3, 2) = 6."""
    return protocol.RoundConfig.build(N=7, A=1, D=0, T=1, m=1, q=16, batch_verify=False)


@pytest.fixture(scope="session")
def robust_round_config():
    """N=9, A=1, D=1, T=2, m=2 over the production field: bound 2+1+max(4, 5) = 8."""
    return protocol.RoundConfig.build(N=9, A=1, D=1, T=2, m=2, q=64)


@pytest.fixture
def small_models():
    """Seven small 3-dimensional real models with one far-away outlier (user 7)."""
    gen = np.random.default_rng(7)
    models = {u: gen.normal(0.0, 0.5, size=3) for u in range(1, 7)}
    models[7] = np.array([20.0, -20.0, 20.0])
    return models


@pytest.fixture
def temp_directory():
    """Create a temporary directory for testing file operations."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield Path(temp_dir)


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: long statistical or reference-setting checks"
    )
