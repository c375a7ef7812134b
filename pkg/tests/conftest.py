"""Shared fixtures: presentations, small orbit slices and a density oracle."""

from fractions import Fraction

import pytest

from orbitsieve.congruence import DensityOracle
from orbitsieve.group_core import load_presentation
from orbitsieve.models import GroupElement
from orbitsieve.orbit_enum import enumerate_orbit

S = GroupElement(a=0, b=-1, c=1, d=0)
T4 = GroupElement(a=1, b=4, c=0, d=1)
MINUS_I = GroupElement(a=-1, b=0, c=0, d=-1)


@pytest.fixture(scope="session")
def hecke4():
    return load_presentation("hecke4")


@pytest.fixture(scope="session")
def sl2z():
    return load_presentation("sl2z")


@pytest.fixture(scope="session")
def tiny_slice(hecke4):
    """hecke4 below T = 3/2: the four unit rows."""
    return enumerate_orbit(hecke4, Fraction(3, 2))


@pytest.fixture(scope="session")
def small_slice(hecke4):
    return enumerate_orbit(hecke4, 2000)


@pytest.fixture(scope="session")
def oracle(hecke4):
    return DensityOracle(hecke4, prime_bound=30)


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    """Run from an empty directory with no ORBIT_SIEVE_* variables set."""
    import os

    for key in list(os.environ):
        if key.startswith("ORBIT_SIEVE_"):
            monkeypatch.delenv(key)
    monkeypatch.chdir(tmp_path)
    return tmp_path
