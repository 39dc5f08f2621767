"""
Shared pytest setup: repository root on sys.path and the `slow` marker
"""
import os
import sys

import numpy as np
import pytest

# Add parent directory to path so `src` imports resolve without installing
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if parent_dir not in sys.path:
    sys.path.append(parent_dir)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: training runs and seed-averaged trend checks")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
