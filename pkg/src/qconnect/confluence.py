"""Numerical experiments on the degeneration ``q = q0**eps -> 1``.

With ``tau = eps * tau0`` the q-characters and the q-logarithm converge to
their differential counterparts ``z**gamma`` and ``log z`` away from the cut
``-q0**R``; local generators of the Galois action converge after
renormalization, and the connection matrices of the family
``A_eps = I + (q_eps - 1) Btilde`` become locally constant on the sectors
cut out by the spirals ``zt * q0**R`` through the singularities ``zt`` of
``Btilde``.
"""
from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg as sla

from .connection import build_triple, connection_P
from .errors import DomainError
from .matfun import apply_to_ss
from .qcore import QParameter, char_eval, gamma1, gamma2, split
from .ratsys import RationalFunction, RationalMatrix, RationalMatrixSystem
from .thetafn import DEFAULT_TOL, qchar, qlog

__all__ = [
    "DEFAULT_TAU0",
    "default_eps_list",
    "ConfluentFamily",
    "TildeCharacterSpec",
    "ScanRow",
    "branch_log",
    "char_limit_scan",
    "log_limit_scan",
    "local_gen_limit",
    "connection_limit_scan",
    "is_nonincreasing",
    "rows_to_csv",
]

DEFAULT_TAU0 = 0.25j
# errors below this are treated as converged when checking monotonicity
NOISE_FLOOR = 1e-9
CUT_RTOL = 1e-6


def default_eps_list():
    return [2.0 ** -k for k in range(2, 8)]


def _eps_q(q0: QParameter, eps) -> QParameter:
    return QParameter.from_tau(eps * q0.tau)


def branch_log(z, q0) -> complex:
    """``log z = 2i pi x`` with ``x = u + v tau0`` and ``-1/2 < u < 1/2``.

    Raises
    ------
    DomainError
        Within ``CUT_RTOL`` of the cut ``-q0**R``.
    """
    q0 = QParameter.coerce(q0)
    s = split(z, q0)
    u = cmath.phase(s.u) / (2 * math.pi)
    if 0.5 - abs(u) < CUT_RTOL:
        raise DomainError(f"z = {complex(z)} lies on the cut -q0^R")
    # z = exp(2i pi u) q0**y and q0**y = exp(-2i pi tau0 y), so v = -y
    return 2j * math.pi * (u - s.y * q0.tau)


def char_limit_scan(q0, gamma, z, eps_list: Sequence[float] = None, shifted: bool = False) -> list:
    """Errors ``|e_{q, q**gamma}(z) - z**gamma|`` along ``q = q0**eps``."""
    q0 = QParameter.coerce(q0)
    eps_list = default_eps_list() if eps_list is None else eps_list
    logz = branch_log(z, q0)
    target = cmath.exp(complex(gamma) * logz)
    out = []
    for eps in eps_list:
        q = _eps_q(q0, eps)
        c = q.power(complex(gamma))
        out.append(abs(qchar(c, z, q, DEFAULT_TOL, shifted=shifted) - target))
    return out


def log_limit_scan(q0, z, eps_list: Sequence[float] = None, shifted: bool = False) -> list:
    """Errors ``|(q - 1) l_q(z) - log z|`` along ``q = q0**eps``."""
    q0 = QParameter.coerce(q0)
    eps_list = default_eps_list() if eps_list is None else eps_list
    logz = branch_log(z, q0)
    out = []
    for eps in eps_list:
        q = _eps_q(q0, eps)
        out.append(abs((q.q - 1) * qlog(z, q, DEFAULT_TOL, shifted=shifted) - logz))
    return out


@dataclass(frozen=True)
class TildeCharacterSpec:
    """Characters of C* adapted to the limit, through ``x' = u'/tau0 + v'``.

    ``kind="gamma1"`` gives ``exp(2i pi w u')``; ``kind="gamma2"`` gives
    ``exp(2i pi v')``.
    """

    kind: str = "gamma1"
    w: complex = 1.0

    def __post_init__(self):
        if self.kind not in ("gamma1", "gamma2"):
            raise DomainError("kind must be 'gamma1' or 'gamma2'")

    def __call__(self, z, tau0) -> complex:
        tau0 = complex(tau0)
        x = cmath.log(complex(z)) / (2j * math.pi)
        inv = 1.0 / tau0
        u = x.imag / inv.imag
        v = x.real - u * inv.real
        if self.kind == "gamma1":
            return cmath.exp(2j * math.pi * self.w * u)
        return cmath.exp(2j * math.pi * v)


@dataclass(frozen=True)
class ConfluentFamily:
    """The family ``A_eps = I + (q0**eps - 1) Btilde`` with ``tau = eps tau0``."""

    q0: QParameter
    Btilde: RationalMatrix

    def __post_init__(self):
        object.__setattr__(self, "q0", QParameter.coerce(self.q0))
        B = self.Btilde
        if not isinstance(B, RationalMatrix):
            B = RationalMatrix(B)
        object.__setattr__(self, "Btilde", B)
        n, m = B.shape
        if n != m:
            raise DomainError("Btilde must be square")

    @property
    def n(self) -> int:
        return self.Btilde.shape[0]

    def q_eps(self, eps) -> QParameter:
        return _eps_q(self.q0, eps)

    def build(self, eps) -> RationalMatrixSystem:
        q = self.q_eps(eps)
        A = RationalMatrix.identity(self.n) + self.Btilde.scale(q.q - 1)
        return RationalMatrixSystem(A, q)

    def B0(self) -> np.ndarray:
        return self.Btilde.value_at_zero()


def local_gen_limit(family: ConfluentFamily, eps_list: Sequence[float] = None, w: complex = -1.0):
    """Errors of the renormalized local generators at 0.

    Returns
    -------
    (list, list)
        ``||gamma1(A_eps(0)_s)**floor(1/eps) - gamma1~^w(exp(2i pi B(0)))||``
        and ``||gamma2(A_eps(0)_s) - gamma2~(exp(2i pi B(0)))||``.
    """
    eps_list = default_eps_list() if eps_list is None else eps_list
    B0 = family.B0()
    ev = np.linalg.eigvals(B0)
    for i in range(len(ev)):
        for j in range(len(ev)):
            dlt = ev[i] - ev[j]
            k = round(dlt.real)
            if k != 0 and abs(dlt - k) < 1e-8:
                raise DomainError("Btilde(0) is resonant: eigenvalues differ by an integer")
    tau0 = family.q0.tau
    E = sla.expm(2j * math.pi * B0)
    L1 = apply_to_ss(lambda c: TildeCharacterSpec("gamma1", w)(c, tau0), E)
    L2 = apply_to_ss(lambda c: TildeCharacterSpec("gamma2")(c, tau0), E)
    err1, err2 = [], []
    for eps in eps_list:
        q = family.q_eps(eps)
        A0 = family.build(eps).at_zero()
        G1 = apply_to_ss(lambda c: char_eval(gamma1(), c, q), A0)
        G2 = apply_to_ss(lambda c: char_eval(gamma2(), c, q), A0)
        m = int(math.floor(1.0 / eps))
        err1.append(float(np.linalg.norm(np.linalg.matrix_power(G1, m) - L1)))
        err2.append(float(np.linalg.norm(G2 - L2)))
    return err1, err2


class ScanRow(NamedTuple):
    eps: float
    probe: int
    error: float


def connection_limit_scan(family: ConfluentFamily, eps_list: Sequence[float] = None,
                          probes=(), K: int = 40) -> list:
    """Stabilization of ``P_eps`` on probe pairs.

    For a probe ``(z1, z2, same_slice)`` the error is ``||P(z1) - P(z2)||``
    when both points lie in one sector; otherwise it is the distance of
    ``P(z1)**-1 P(z2)`` from its value at the smallest eps.
    """
    eps_list = default_eps_list() if eps_list is None else list(eps_list)
    probes = list(probes)
    values = []
    for eps in eps_list:
        t = build_triple(family.build(eps), K)
        row = []
        for z1, z2, same in probes:
            P1 = connection_P(t, z1)
            P2 = connection_P(t, z2)
            row.append(P1 - P2 if same else np.linalg.solve(P1, P2))
        values.append(row)
    ref = values[int(np.argmin(eps_list))]
    out = []
    for eps, row in zip(eps_list, values):
        for i, (val, (_, _, same)) in enumerate(zip(row, probes)):
            err = np.linalg.norm(val) if same else np.linalg.norm(val - ref[i])
            out.append(ScanRow(float(eps), i, float(err)))
    return out


def is_nonincreasing(errors, slack: float = 1.2, floor: float = NOISE_FLOOR) -> bool:
    """Each error is at most ``slack`` times its predecessor, or below ``floor``."""
    return all(b <= slack * a or b <= floor for a, b in zip(errors, errors[1:]))


def rows_to_csv(rows) -> str:
    """CSV with columns ``eps,probe,error``."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["eps", "probe", "error"])
    for r in rows:
        wr.writerow([repr(float(r[0])), int(r[1]), repr(float(r[2]))])
    return buf.getvalue()
