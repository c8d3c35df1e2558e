"""
Shared pytest configuration.

Puts the project root on sys.path (so ``src.*`` imports resolve the same way
run.py resolves them) and gates long learnability runs behind ``--runslow``.
"""
import sys
from pathlib import Path

import pytest

project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run slow training/learnability tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running training test (needs --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
