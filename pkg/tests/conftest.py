import cmath
import math
import sys

import mpmath
import numpy as np
import pytest

from qconnect import QParameter, RationalFunction, RationalMatrix, RationalMatrixSystem

Z = RationalFunction([0.0, 1.0])


def theta_oracle(z, q, terms=80, dps=40):
    """Direct high-precision summation of sum_n q**(-n(n-1)/2) z**n."""
    with mpmath.workdps(dps):
        z = mpmath.mpc(z)
        q = mpmath.mpc(q)
        s = mpmath.mpc(0)
        for n in range(-terms, terms + 1):
            s += q ** (-n * (n - 1) // 2) * z ** n
        return complex(s)


def annulus_points(q, n, rng):
    """n random points with 1 <= |z| < |q|."""
    r = abs(q) ** rng.uniform(0, 1, n)
    return r * np.exp(2j * math.pi * rng.uniform(0, 1, n))


def unipotent_system(q=4):
    a = Z / (1 + Z * Z)
    return RationalMatrixSystem(RationalMatrix([[1, a], [0, 1]]), QParameter.from_q(q)), a


def rank1_regular_system(u=(2, 3), v=(6, 1), q=3 + 1j):
    a = RationalFunction([1.0])
    for ui, vi in zip(u, v):
        a = a * (1 - Z / ui) / (1 - Z / vi)
    return RationalMatrixSystem(RationalMatrix([[a]]), QParameter.from_q(q))


def semisimple_rank1_system(c=1.5 + 0.5j, q=4):
    a = c * (1 - Z / 2) / (1 - Z / 2.5)
    return RationalMatrixSystem(RationalMatrix([[a]]), QParameter.from_q(q))


def safe_points(n, rng, lo=0.3, hi=3.0):
    r = rng.uniform(lo, hi, n)
    return r * np.exp(2j * math.pi * rng.uniform(0, 1, n))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def q4():
    return QParameter.from_q(4)


def e_iphi(phi):
    return cmath.exp(1j * phi)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
