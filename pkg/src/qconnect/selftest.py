"""Invariant checks runnable without a test framework (``qconnect selftest``).

Each check returns the measured residual and the bound it must stay under.
"""
from __future__ import annotations

import cmath
import math
from typing import Callable, Dict, List, NamedTuple

import numpy as np

from . import confluence, connection, flatcat, matfun, qcore, ratsys, reduction, thetafn


class CheckResult(NamedTuple):
    module: str
    name: str
    value: float
    bound: float

    @property
    def ok(self) -> bool:
        return bool(np.isfinite(self.value) and self.value < self.bound)


_REGISTRY: Dict[str, List[Callable[[], CheckResult]]] = {}


def _check(module):
    def deco(f):
        _REGISTRY.setdefault(module, []).append(f)
        return f

    return deco


def _z():
    return ratsys.RationalFunction([0.0, 1.0])


@_check("qcore")
def _qcore_kernel():
    q = qcore.QParameter.from_q(4)
    rng = np.random.default_rng(1)
    worst = 0.0
    for z in rng.normal(size=20) + 1j * rng.normal(size=20):
        v = qcore.char_eval(qcore.gamma1(), z, q) * qcore.char_eval(qcore.gamma2(-q.tau), z, q)
        worst = max(worst, abs(v - z) / abs(z))
    return CheckResult("qcore", "gamma1 * gamma2^-tau = id", worst, 1e-10)


@_check("thetafn")
def _theta_functional_equation():
    worst = 0.0
    rng = np.random.default_rng(2)
    for qv in (1.5, 4.0, 10.0):
        q = qcore.QParameter.from_q(qv)
        for _ in range(20):
            z = qv ** rng.uniform(0, 1) * cmath.exp(2j * math.pi * rng.uniform())
            lhs = thetafn.theta(q.q * z, q)
            worst = max(worst, abs(lhs - thetafn.THETA_SIGN * q.q * z * thetafn.theta(z, q)) / abs(lhs))
    return CheckResult("thetafn", "theta functional equation", worst, 1e-12)


@_check("thetafn")
def _qchar_powers():
    q = qcore.QParameter.from_q(3 + 1j)
    z = 0.7 + 0.4j
    worst = max(abs(thetafn.qchar(q.q ** n, z, q) - z ** n) / abs(z ** n) for n in range(-2, 4))
    return CheckResult("thetafn", "e_{q,q^n} = z^n", worst, 1e-10)


@_check("matfun")
def _e_matrix_equation():
    q = qcore.QParameter.from_q(4)
    A = np.array([[2.0, 1.0], [0.0, 0.5 + 1j]])
    z = 0.3 + 0.8j
    r = np.linalg.norm(matfun.e_matrix(A, q.q * z, q) - A @ matfun.e_matrix(A, z, q))
    return CheckResult("matfun", "e_A(qz) = A e_A(z)", float(r), 1e-9)


@_check("ratsys")
def _gauge_round_trip():
    q = qcore.QParameter.from_q(2)
    z = _z()
    A = ratsys.RationalMatrixSystem(ratsys.RationalMatrix([[1, z], [z / (1 - z / 3), 2 * (1 - z / 7)]]), q)
    A2, F = ratsys.normalize_nonresonant(A, 0)
    back = ratsys.gauge_transform(A2, F.inv())
    ok = back.A.allclose(A.A, 1e-10) and not ratsys.resonance_classes(A2.at_zero(), q)
    return CheckResult("ratsys", "normalize and gauge back", 0.0 if ok else 1.0, 0.5)


@_check("reduction")
def _recurrence():
    q = qcore.QParameter.from_q(4)
    z = _z()
    A = ratsys.RationalMatrixSystem(ratsys.RationalMatrix([[1, z / (1 + z * z)], [0, 1]]), q)
    s = reduction.reduce_at_zero(A, 40)
    return CheckResult("reduction", "recurrence residual", float(s.recurrence_residuals().max()), 1e-10)


@_check("connection")
def _ellipticity():
    q = qcore.QParameter.from_q(4)
    z = _z()
    a = z / (1 + z * z)
    t = connection.build_triple(ratsys.RationalMatrixSystem(ratsys.RationalMatrix([[1, a], [0, 1]]), q))
    pts = [0.3 + 0.2j, 1.1 - 0.7j, -0.4 + 1.3j]
    r = max(np.linalg.norm(connection.connection_P(t, q.q * p) - connection.connection_P(t, p)) for p in pts)
    return CheckResult("connection", "P(qz) = P(z)", float(r), 1e-8)


@_check("flatcat")
def _plethysm():
    bad = 0
    for n in range(1, 5):
        for p in range(1, 5):
            want = list(range(n + p - 1, abs(n - p), -2))
            bad += flatcat.jordan_tensor_decompose(n, p) != want
    return CheckResult("flatcat", "Jordan tensor decomposition", float(bad), 0.5)


@_check("confluence")
def _char_limit():
    q0 = qcore.QParameter.from_tau(confluence.DEFAULT_TAU0)
    errs = confluence.char_limit_scan(q0, 0.3 + 0.1j, cmath.exp(1j * math.pi / 3))
    return CheckResult("confluence", "character limit decreasing",
                       0.0 if confluence.is_nonincreasing(errs) else 1.0, 0.5)


def modules() -> list:
    return sorted(_REGISTRY)


def run(filter_module: str | None = None) -> list:
    out = []
    for mod in modules():
        if filter_module and mod != filter_module:
            continue
        for f in _REGISTRY[mod]:
            out.append(f())
    return out
