#!/usr/bin/env python3
"""
Pytest configuration file for Dephasing Tomography tests.
"""
import json
import os
import shutil
import sys
import tempfile

import pytest

# Add the parent directory to the path so we can import the package
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import config
from dephasing_tomography.noise_models import DisplacedLorentzian, OrnsteinUhlenbeck, White

# Seed shared by every randomized test
TEST_SEED = 12345


@pytest.fixture
def seed():
    """
    Fixture that provides the fixed test seed.
    """
    return TEST_SEED


@pytest.fixture
def white_model():
    """
    Fixture that provides a White model with T2 = 1.
    """
    return White(T2=1.0)


@pytest.fixture
def ou_model():
    """
    Fixture that provides an Ornstein-Uhlenbeck model with T2 = 1 and tau_c = 0.5.
    """
    return OrnsteinUhlenbeck(T2=1.0, tau_c=0.5)


@pytest.fixture
def dl_model():
    """
    Fixture that provides a Displaced-Lorentzian model with T2 = 1, tau_c = 1 and delta_c = 1.
    """
    return DisplacedLorentzian.from_timescales(1.0, 1.0, 1.0)


@pytest.fixture
def non_markovian_model():
    """
    Fixture that provides a Displaced-Lorentzian model deep in the non-Markovian regime.
    """
    return DisplacedLorentzian(g2n=1.0, kappa=0.5, delta_c=5.0)


@pytest.fixture
def temp_output_dir():
    """
    Fixture that provides a temporary output directory for tests.
    Cleans up after the test is done.
    """
    # Create a temporary directory
    temp_dir = tempfile.mkdtemp()

    # Store the original paths
    original = (config.OUTPUT_DIR, config.LOG_DIR, config.MAIN_LOG_FILE)

    # Override the output directory and all dependent paths
    config.OUTPUT_DIR = os.path.join(temp_dir, "output")
    config.LOG_DIR = os.path.join(config.OUTPUT_DIR, "logs")
    config.MAIN_LOG_FILE = os.path.join(config.LOG_DIR, "tomography.log")
    os.makedirs(config.LOG_DIR, exist_ok=True)

    yield config.OUTPUT_DIR

    # Restore the original paths
    config.OUTPUT_DIR, config.LOG_DIR, config.MAIN_LOG_FILE = original

    # Clean up the temporary directory
    shutil.rmtree(temp_dir)


@pytest.fixture
def write_config(temp_output_dir):
    """
    Fixture that provides a helper writing a JSON config document into the temporary directory.
    """
    def _write(document, name="config.json"):
        path = os.path.join(os.path.dirname(temp_output_dir), name)
        with open(path, "w") as f:
            json.dump(document, f)
        return path
    return _write


def cli_args(config_path, out=None, seed=None, threads=1):
    """
    Helper building the argument namespace a subcommand main() receives.
    """
    return type('Args', (), {
        'config': config_path,
        'out': out,
        'seed': seed,
        'threads': threads
    })
