"""Flat objects: constant invertible matrices viewed as q-difference systems.

Morphisms between flat objects ``A -> B`` are Laurent polynomial matrices
``F`` with ``F(qz) A = B F(z)``; a pair ``(gamma, lam)`` of a character of C*
and a complex number acts on every flat object by ``gamma(A_s) A_u**lam``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict

import numpy as np

from .errors import ContractError, DomainError
from .matfun import DunfordPair, apply_to_ss, as_matrix, dunford, kron, unipotent_pow
from .qcore import AnnulusDecomposition, CharacterSpec, QParameter, annulus_decompose, char_eval

__all__ = [
    "FlatObject",
    "GaloisElement",
    "LaurentMatrixMorphism",
    "hom_window",
    "hom_space",
    "act",
    "naturality_check",
    "tensor_compat_check",
    "jordan_tensor_decompose",
    "eigen_line_condition",
]


@dataclass(frozen=True)
class FlatObject:
    """A constant invertible matrix with its cached Dunford parts.

    Build with :meth:`of`.
    """

    A: np.ndarray
    dunford: DunfordPair
    annulus_spectrum: tuple
    q: QParameter

    @classmethod
    def of(cls, A, q) -> "FlatObject":
        q = QParameter.coerce(q)
        A = as_matrix(A)
        d = dunford(A)
        spec = tuple(annulus_decompose(c, q) for c in np.linalg.eigvals(d.s))
        return cls(A, d, spec, q)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def s(self) -> np.ndarray:
        return self.dunford.s

    @property
    def u(self) -> np.ndarray:
        return self.dunford.u

    def spectrum(self) -> np.ndarray:
        return np.array([d.c for d in self.annulus_spectrum])

    def tensor(self, other: "FlatObject") -> "FlatObject":
        return FlatObject.of(kron(self.A, other.A), self.q)


@dataclass(frozen=True)
class GaloisElement:
    """The pair ``(gamma, lam)``; products multiply characters and add lams."""

    gamma: CharacterSpec = field(default_factory=CharacterSpec)
    lam: complex = 0j

    def __mul__(self, other: "GaloisElement") -> "GaloisElement":
        return GaloisElement(self.gamma * other.gamma, self.lam + other.lam)

    def at_q(self, q) -> complex:
        """``gamma(q)``; equal to 1 for group elements."""
        q = QParameter.coerce(q)
        return char_eval(self.gamma, q.q, q)

    def is_group_element(self, q, tol: float = 1e-10) -> bool:
        return abs(self.at_q(q) - 1) <= tol


@dataclass(frozen=True)
class LaurentMatrixMorphism:
    """``F(z) = sum_k F_k z**k`` with finite support, from ``source`` to ``target``."""

    terms: Dict[int, np.ndarray]
    source: FlatObject = None
    target: FlatObject = None

    def __call__(self, z) -> np.ndarray:
        z = complex(z)
        out = None
        for k, Fk in self.terms.items():
            t = Fk * z ** k
            out = t if out is None else out + t
        return out

    def residual(self, z) -> float:
        """``||F(qz) A - B F(z)||`` for the declared endpoints."""
        q = self.source.q
        return float(np.linalg.norm(self(q.q * z) @ self.source.A - self.target.A @ self(z)))


def hom_window(A: FlatObject, B: FlatObject) -> range:
    """All degrees k for which ``q**k Sp(A)`` can meet ``Sp(B)``."""
    q = A.q
    ma = np.abs(A.spectrum())
    mb = np.abs(B.spectrum())
    lo = np.log(mb.min() / ma.max()) / q.log_abs
    hi = np.log(mb.max() / ma.min()) / q.log_abs
    return range(int(np.ceil(lo - 1e-9)), int(np.floor(hi + 1e-9)) + 1)


def hom_space(A: FlatObject, B: FlatObject, q=None, degree_window=None) -> list:
    """Basis of the morphisms ``A -> B``, one degree-homogeneous element each.

    Raises
    ------
    ContractError
        If ``degree_window`` misses a degree allowed by the spectra.
    """
    q = A.q if q is None else QParameter.coerce(q)
    need = hom_window(A, B)
    if degree_window is None:
        degree_window = need
    else:
        missing = set(need) - set(degree_window)
        if missing:
            raise ContractError(f"degree window misses degrees {sorted(missing)}")
    n, m = A.n, B.n
    scale = max(np.linalg.norm(A.A, 2), np.linalg.norm(B.A, 2))
    basis = []
    for k in degree_window:
        qk = q.int_power(k)
        # vec(qk X A - B X) with X of shape m x n, column-major
        L = qk * np.kron(A.A.T, np.eye(m)) - np.kron(np.eye(n), B.A)
        _, s, vh = np.linalg.svd(L)
        tol = 1e-10 * max(1.0, abs(qk)) * scale
        null = vh[np.sum(s > tol):].conj()
        for v in null:
            X = v.reshape((m, n), order="F")
            X = X / X.flat[np.argmax(np.abs(X))]
            basis.append(LaurentMatrixMorphism({k: X}, A, B))
    return basis


def act(g: GaloisElement, X: FlatObject, q=None) -> np.ndarray:
    """The action ``gamma(A_s) A_u**lam`` of g on the flat object X."""
    q = X.q if q is None else QParameter.coerce(q)
    S = apply_to_ss(lambda c: char_eval(g.gamma, c, q), X.A)
    return S @ unipotent_pow(X.u, g.lam)


def naturality_check(g: GaloisElement, F: LaurentMatrixMorphism, z0, q=None, z1=None) -> float:
    """``||F(z1) act(g, A) - act(g, B) F(z0)||`` for ``F: A -> B``.

    By default ``z1 = gamma(q) z0``, the target of the arrow g from z0;
    passing another ``z1`` measures how far a mismatched pair is from
    natural.
    """
    q = F.source.q if q is None else QParameter.coerce(q)
    if z1 is None:
        z1 = g.at_q(q) * complex(z0)
    lhs = F(z1) @ act(g, F.source, q)
    rhs = act(g, F.target, q) @ F(z0)
    return float(np.linalg.norm(lhs - rhs))


def tensor_compat_check(g: GaloisElement, X: FlatObject, Y: FlatObject, q=None) -> float:
    """``||act(g, X (x) Y) - act(g, X) (x) act(g, Y)||``."""
    q = X.q if q is None else QParameter.coerce(q)
    lhs = act(g, X.tensor(Y), q)
    rhs = kron(act(g, X, q), act(g, Y, q))
    return float(np.linalg.norm(lhs - rhs))


def _exact_rank(M) -> int:
    rows = [[Fraction(int(x)) for x in row] for row in M]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][c]
        for r in range(rank + 1, len(rows)):
            if rows[r][c] != 0:
                f = rows[r][c] / p
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _jordan_block(n):
    return np.eye(n, dtype=np.int64) + np.eye(n, k=1, dtype=np.int64)


def jordan_tensor_decompose(n: int, p: int) -> list:
    """Jordan block sizes of ``J_n(1) (x) J_p(1)``, largest first.

    Uses exact integer ranks of powers of ``X - I``.
    """
    if not (1 <= n <= 8 and 1 <= p <= 8):
        raise DomainError("n and p must lie in 1..8")
    N = np.kron(_jordan_block(p), _jordan_block(n)) - np.eye(n * p, dtype=np.int64)
    N = N.astype(object)
    ranks = [n * p]
    Pk = np.eye(n * p, dtype=np.int64).astype(object)
    while ranks[-1] > 0:
        Pk = Pk.dot(N)
        ranks.append(_exact_rank(Pk))
    # blocks of size >= k number ranks[k-1] - ranks[k]
    ge = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))] + [0]
    sizes = []
    for k in range(1, len(ge)):
        sizes += [k] * (ge[k - 1] - ge[k])
    return sorted(sizes, reverse=True)


def eigen_line_condition(A_s_diag, x, gammas, q, tol: float = 1e-10) -> bool:
    """Whether the line through x is fixed by every ``(gamma, 0)`` on diag(A_s).

    For each pair of coordinates where x is nonzero the characters must
    agree on the annulus representatives of the two eigenvalues.
    """
    q = QParameter.coerce(q)
    x = np.asarray(x, dtype=complex)
    eigs = [complex(c) for c in A_s_diag]
    if len(eigs) != x.size:
        raise DomainError("x and the eigenvalue list differ in length")
    big = np.abs(x).max()
    if big == 0:
        raise DomainError("x must be nonzero")
    support = [i for i in range(x.size) if abs(x[i]) > 1e-12 * big]
    bars = {i: annulus_decompose(eigs[i], q).cbar for i in support}
    for g in gammas:
        vals = {i: char_eval(g, bars[i], q) for i in support}
        for i in support:
            for j in support:
                if j > i and abs(vals[i] - vals[j]) > tol:
                    return False
    return True
