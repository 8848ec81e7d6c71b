"""Matrix calculus over C*: Kronecker products, multiplicative Dunford
decomposition, functions of semi-simple parts and matrix characters."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import AmbiguityError, DomainError, ResonanceError
from .qcore import QParameter
from .thetafn import DEFAULT_TOL, SeriesTolerance, qchar, qlog

__all__ = [
    "DunfordPair",
    "SpectralData",
    "as_matrix",
    "kron",
    "spectral_data",
    "dunford",
    "apply_to_ss",
    "unipotent_pow",
    "is_identity",
    "e_matrix",
    "Phi_cocycle",
    "solve_intertwine",
]

# single-linkage radius for merging computed eigenvalues; a Jordan block of
# size 3 spreads its eigenvalue by about eps**(1/3) ~ 5e-6
CLUSTER_RTOL = 1e-5
# clusters closer than this are neither clearly equal nor clearly distinct
AMBIGUITY_RTOL = 1e-4
INVARIANT_RTOL = 1e-9


def as_matrix(A) -> np.ndarray:
    """Coerce to a finite complex 2-D array."""
    M = np.atleast_2d(np.asarray(A, dtype=complex))
    if M.ndim != 2:
        raise DomainError("expected a 2-D matrix")
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has non-finite entries")
    return M


def kron(A, B) -> np.ndarray:
    """Kronecker product with the first factor's index running fastest.

    Entry ``[i1 + p1*i2, j1 + n1*j2]`` (0-based) is ``A[i1, j1] * B[i2, j2]``
    where ``A`` is ``p1 x n1``.  This is ``numpy.kron(B, A)``.
    """
    return np.kron(as_matrix(B), as_matrix(A))


def _scale(A):
    return max(np.linalg.norm(A, 2), 1e-300)


@dataclass(frozen=True)
class SpectralData:
    """Block diagonalisation ``A = Q blockdiag(B_i) Q^-1`` by generalized
    eigenspaces; ``values[i]`` is the eigenvalue of block i."""

    Q: np.ndarray
    Qinv: np.ndarray
    values: tuple
    sizes: tuple

    def blocks(self):
        start = 0
        for lam, m in zip(self.values, self.sizes):
            yield lam, slice(start, start + m)
            start += m


def _cluster(eigs, scale):
    n = len(eigs)
    labels = list(range(n))

    def find(i):
        while labels[i] != i:
            labels[i] = labels[labels[i]]
            i = labels[i]
        return i

    tol = CLUSTER_RTOL * scale
    for i in range(n):
        for j in range(i + 1, n):
            if abs(eigs[i] - eigs[j]) <= tol:
                labels[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(eigs[i])
    return [np.array(g) for g in groups.values()]


def spectral_data(A) -> SpectralData:
    """Generalized eigenspace decomposition of an invertible matrix.

    Raises
    ------
    DomainError
        If A is singular.
    AmbiguityError
        If computed eigenvalues cannot be cleanly grouped.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise DomainError("square matrix required")
    scale = _scale(A)
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-12 * scale:
        raise DomainError("matrix is singular")
    eigs = np.linalg.eigvals(A)
    groups = _cluster(eigs, scale)
    centers = [g.mean() for g in groups]
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if abs(centers[i] - centers[j]) < AMBIGUITY_RTOL * scale:
                raise AmbiguityError(
                    f"eigenvalues {centers[i]} and {centers[j]} are too close to classify"
                )
    cols = []
    sizes = []
    for lam, g in zip(centers, groups):
        m = len(g)
        P = np.linalg.matrix_power(A - lam * np.eye(n), m)
        _, s, vh = np.linalg.svd(P)
        # the generalized eigenspace is the m-dimensional near-kernel
        if m < n and s[n - m - 1] <= 1e3 * s[n - m] + 1e-300:
            raise AmbiguityError(f"no clean generalized eigenspace at {lam}")
        cols.append(vh[n - m:].conj().T)
        sizes.append(m)
    Q = np.hstack(cols)
    Qinv = np.linalg.inv(Q)
    # refine each eigenvalue as the mean of its compressed block spectrum
    Bd = Qinv @ A @ Q
    values = []
    start = 0
    for m in sizes:
        values.append(complex(np.trace(Bd[start:start + m, start:start + m]) / m))
        start += m
    return SpectralData(Q, Qinv, tuple(values), tuple(sizes))


@dataclass(frozen=True)
class DunfordPair:
    """Commuting factors ``A = s u`` with s semi-simple and u unipotent."""

    s: np.ndarray
    u: np.ndarray


def dunford(A) -> DunfordPair:
    """Multiplicative Dunford decomposition ``A = A_s A_u``."""
    A = as_matrix(A)
    sd = spectral_data(A)
    d = np.concatenate([np.full(m, lam) for lam, m in zip(sd.values, sd.sizes)])
    s = (sd.Q * d) @ sd.Qinv
    u = (sd.Q * (1.0 / d)) @ sd.Qinv @ A
    return DunfordPair(s, u)


def apply_to_ss(f, A) -> np.ndarray:
    """``f(A_s)``: apply a scalar map to the eigenvalues of the semi-simple part."""
    sd = A if isinstance(A, SpectralData) else spectral_data(A)
    vals = []
    for lam, m in zip(sd.values, sd.sizes):
        try:
            v = complex(f(lam))
        except (ZeroDivisionError, OverflowError) as exc:
            raise DomainError(f"function undefined at eigenvalue {lam}") from exc
        if not np.isfinite(v):
            raise DomainError(f"function undefined at eigenvalue {lam}")
        vals.append(np.full(m, v))
    d = np.concatenate(vals)
    return (sd.Q * d) @ sd.Qinv


def is_identity(U, rtol: float = 1e-12) -> bool:
    U = as_matrix(U)
    return bool(np.linalg.norm(U - np.eye(U.shape[0])) <= rtol * max(1.0, np.linalg.norm(U)))


def unipotent_pow(U, lam) -> np.ndarray:
    """``U**lam = sum_k binom(lam, k) (U - I)**k`` for unipotent U."""
    U = as_matrix(U)
    n = U.shape[0]
    N = U - np.eye(n)
    scale = max(1.0, np.linalg.norm(U))
    if np.linalg.norm(np.linalg.matrix_power(N, n)) > INVARIANT_RTOL * scale ** n:
        raise DomainError("matrix is not unipotent")
    lam = complex(lam)
    out = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    coef = 1 + 0j
    for k in range(1, n):
        coef *= (lam - k + 1) / k
        term = term @ N
        out = out + coef * term
    return out


def e_matrix(A, z, q, tol: SeriesTolerance = DEFAULT_TOL, shifted: bool = False) -> np.ndarray:
    """Matrix q-character ``e_{q,A}(z) = e_{q,A_s}(z) A_u**l_q(z)``.

    Satisfies ``e_{q,A}(qz) = A e_{q,A}(z)``.
    """
    q = QParameter.coerce(q)
    A = as_matrix(A)
    sd = spectral_data(A)
    E = apply_to_ss(lambda c: qchar(c, z, q, tol, shifted=shifted), sd)
    d = np.concatenate([np.full(m, lam) for lam, m in zip(sd.values, sd.sizes)])
    u = (sd.Q * (1.0 / d)) @ sd.Qinv @ A
    if is_identity(u, 1e-10):
        return E
    return E @ unipotent_pow(u, qlog(z, q, tol, shifted=shifted))


def Phi_cocycle(A, B, z, q, tol: SeriesTolerance = DEFAULT_TOL) -> np.ndarray:
    """Elliptic matrix cocycle ``e_{A_s (x) B_s}^-1 (e_{A_s} (x) e_{B_s})``."""
    q = QParameter.coerce(q)
    As = dunford(A).s
    Bs = dunford(B).s
    eA = e_matrix(As, z, q, tol)
    eB = e_matrix(Bs, z, q, tol)
    eAB = e_matrix(kron(As, Bs), z, q, tol)
    return np.linalg.solve(eAB, kron(eA, eB))


def solve_intertwine(k: int, A0, RHS, q) -> np.ndarray:
    """Solve ``q**k X A0 - A0 X = RHS`` for X.

    Raises
    ------
    ResonanceError
        If ``q**k Sp(A0)`` meets ``Sp(A0)``.
    """
    q = QParameter.coerce(q)
    A0 = as_matrix(A0)
    RHS = as_matrix(RHS)
    n = A0.shape[0]
    qk = q.int_power(k)
    eigs = np.linalg.eigvals(A0)
    scale = _scale(A0)
    for a in eigs:
        for b in eigs:
            if abs(qk * a - b) < 1e-8 * max(scale, abs(qk) * scale):
                raise ResonanceError(
                    f"q^{k}*{a} collides with {b}", pair=(complex(a), complex(b))
                )
    m = RHS.shape[1]
    if RHS.shape[0] != n or m != n:
        raise DomainError("RHS must have the shape of A0")
    L = qk * np.kron(A0.T, np.eye(n)) - np.kron(np.eye(n), A0)
    x = sla.solve(L, RHS.reshape(-1, order="F"))
    return x.reshape((n, n), order="F")
