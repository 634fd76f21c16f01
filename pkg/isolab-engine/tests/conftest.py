"""
Pytest configuration file for the isogeny lab tests.
"""

import sys
from pathlib import Path

import pytest

# Add the project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from numtheory.fields import PrimeField, QuadExtField  # noqa: E402


@pytest.fixture
def f101():
    return PrimeField(101)


@pytest.fixture
def f1009():
    return PrimeField(1009)


@pytest.fixture
def f13_squared():
    return QuadExtField(PrimeField(13))
