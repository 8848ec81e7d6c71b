"""Local reduction of a fuchsian system to its constant form.

At 0 the gauge ``F = sum F_k z**k`` with ``F_0 = I`` solves
``F(qz) A(0) = A(z) F(z)``; coefficients come order by order from
``q**k F_k A(0) - A(0) F_k = sum_{j>=1} A_j F_{k-j}``.

At infinity the same construction is run in ``w = 1/z``: the gauge
``G(w) = F(1/w)`` solves ``G(qw) C(0) = C(w) G(w)`` with
``C(w) = A(1/(qw))**-1`` and ``C(0) = A(inf)**-1``.

Outside the disk where the truncated series is accurate, the functional
equation ``G(w) = C(w/q) G(w/q) C(0)**-1`` continues the gauge along
q-spirals.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError, NumericFailure, PoleProximityError
from .flatcat import FlatObject
from .matfun import solve_intertwine
from .qcore import QParameter, annulus_decompose
from .ratsys import RationalMatrixSystem, fuchsian_at, singular_locus

__all__ = [
    "DEFAULT_K",
    "MAX_K",
    "UNSAFE_RTOL",
    "TruncatedMatrixSeries",
    "reduce_at_zero",
    "reduce_at_infty",
    "eval_gauge",
    "spiral_distance",
    "product_solution_regular",
]

DEFAULT_K = 40
MAX_K = 200
UNSAFE_RTOL = 1e-6
# retained terms below this size mark the edge of the usable disk
TERM_TOL = 1e-12
MAX_CONTINUATION = 2000


@dataclass(frozen=True)
class TruncatedMatrixSeries:
    """A truncated local gauge together with the data needed to continue it.

    Attributes
    ----------
    base_point : 0 or "inf"
    A0 : FlatObject
        The constant form ``A(0)`` or ``A(inf)``.
    coeffs : ndarray, shape (K+1, n, n)
        Coefficients in the local variable (z at 0, 1/z at infinity).
    trust_radius : float
        Radius in the local variable inside which the series is summed.
    system_ref : RationalMatrixSystem
    local_coeffs : ndarray
        Taylor coefficients of the local system matrix C.
    singular_points : tuple
        Distinct points of S(A) in C*.
    """

    base_point: object
    A0: FlatObject
    coeffs: np.ndarray
    trust_radius: float
    system_ref: RationalMatrixSystem
    local_coeffs: np.ndarray
    singular_points: tuple

    @property
    def K(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def q(self) -> QParameter:
        return self.system_ref.q

    @property
    def C0(self) -> np.ndarray:
        return self.local_coeffs[0]

    def local_matrix(self, w) -> np.ndarray:
        """``C(w)``: ``A(w)`` at 0, ``A(1/(qw))**-1`` at infinity."""
        if self.base_point == 0:
            return self.system_ref(w)
        return np.linalg.inv(self.system_ref(1.0 / (self.q.q * w)))

    def recurrence_residuals(self) -> np.ndarray:
        """Relative residuals of ``q**k G_k C0 = sum_{j<=k} C_j G_{k-j}``.

        Entry k is the residual norm divided by the largest norm among the
        terms of that equation (at least 1).
        """
        q = self.q
        C, G = self.local_coeffs, self.coeffs
        out = np.empty(self.K + 1)
        for k in range(self.K + 1):
            terms = [C[j] @ G[k - j] for j in range(k + 1)]
            lhs = q.int_power(k) * G[k] @ C[0]
            scale = max([1.0, np.linalg.norm(lhs)] + [np.linalg.norm(t) for t in terms])
            out[k] = np.linalg.norm(lhs - sum(terms)) / scale
        return out

    def effective_radius(self) -> float:
        """Radius where the last five retained terms drop below ``TERM_TOL``."""
        norms = np.linalg.norm(self.coeffs, axis=(1, 2))
        r = self.trust_radius
        K = self.K
        for k in range(max(1, K - 4), K + 1):
            if norms[k] > 0:
                r = min(r, (TERM_TOL / norms[k]) ** (1.0 / k))
        return r

    def sum_series(self, w) -> np.ndarray:
        out = np.zeros_like(self.coeffs[0])
        for Gk in self.coeffs[::-1]:
            out = out * w + Gk
        return out


def _check_K(K):
    if not (isinstance(K, (int, np.integer)) and 0 <= K <= MAX_K):
        raise ContractError(f"truncation order must be an integer in 0..{MAX_K}")


def _solve_coeffs(C, q, K):
    n = C.shape[1]
    G = np.zeros((K + 1, n, n), complex)
    G[0] = np.eye(n)
    for k in range(1, K + 1):
        rhs = sum(C[j] @ G[k - j] for j in range(1, k + 1))
        G[k] = solve_intertwine(k, C[0], rhs, q)
    return G


def _trust(points, q, scale=0.9):
    if not points:
        return np.inf
    return scale * min(abs(p) for p in points) / abs(q.q)


def reduce_at_zero(A: RationalMatrixSystem, K: int = DEFAULT_K) -> TruncatedMatrixSeries:
    """Gauge series at 0 reducing A to the constant system ``A(0)``.

    Raises
    ------
    ContractError
        If A is not strictly fuchsian at 0 or K is out of range.
    ResonanceError
        If ``A(0)`` is resonant.
    """
    _check_K(K)
    rep = fuchsian_at(A, 0)
    if not rep:
        raise ContractError("; ".join(rep.diagnostics))
    C = A.A.taylor(K)
    G = _solve_coeffs(C, A.q, K)
    pts = tuple(singular_locus(A).distinct())
    return TruncatedMatrixSeries(
        0, FlatObject.of(C[0], A.q), G, _trust(pts, A.q), A, C, pts
    )


def _inverse_series(E, K):
    """Coefficients of the inverse of the matrix series ``sum E_k x**k``."""
    D = np.zeros_like(E)
    E0inv = np.linalg.inv(E[0])
    D[0] = E0inv
    for k in range(1, K + 1):
        D[k] = -E0inv @ sum(E[j] @ D[k - j] for j in range(1, k + 1))
    return D


def reduce_at_infty(A: RationalMatrixSystem, K: int = DEFAULT_K) -> TruncatedMatrixSeries:
    """Gauge series at infinity, in the variable ``w = 1/z``."""
    _check_K(K)
    rep = fuchsian_at(A, "inf")
    if not rep:
        raise ContractError("; ".join(rep.diagnostics))
    q = A.q
    E = A.A.taylor_infty(K)
    D = _inverse_series(E, K)
    C = D * (q.q ** np.arange(K + 1))[:, None, None]
    G = _solve_coeffs(C, q, K)
    pts = tuple(singular_locus(A).distinct())
    local_pts = [1.0 / (q.q * p) for p in pts]
    return TruncatedMatrixSeries(
        "inf", FlatObject.of(E[0], q), G, _trust(local_pts, q), A, C, pts
    )


def spiral_distance(z, points, q):
    """Smallest relative distance from z to ``q**Z * points``, and the point."""
    q = QParameter.coerce(q)
    best, arg = np.inf, None
    for p in points:
        cb = annulus_decompose(complex(z) / p, q).cbar
        d = min(abs(cb - 1.0), abs(cb - q.q) / abs(q.q))
        if d < best:
            best, arg = d, p
    return best, arg


def eval_gauge(series: TruncatedMatrixSeries, z, guard: bool = True, return_steps: bool = False):
    """Value at z of the local gauge described by ``series``.

    Parameters
    ----------
    series : TruncatedMatrixSeries
    z : nonzero complex
    guard : bool
        Refuse points within ``UNSAFE_RTOL`` of the spirals ``q**Z S(A)``.
    return_steps : bool
        Also return the number of continuation steps used.

    Raises
    ------
    PoleProximityError
        If z is too close to a singular spiral.
    NumericFailure
        If more than ``MAX_CONTINUATION`` steps would be needed.
    """
    z = complex(z)
    if z == 0:
        raise DomainError("eval_gauge is evaluated on C* only")
    q = series.q
    if guard:
        d, p = spiral_distance(z, series.singular_points, q)
        if d < UNSAFE_RTOL:
            raise PoleProximityError(
                f"point {z} is within {d:.2e} of the singular spiral through {p}",
                point=z,
                spiral=p,
            )
    w = z if series.base_point == 0 else 1.0 / z
    r = series.effective_radius()
    j = 0
    if abs(w) > r:
        j = int(np.ceil(np.log(abs(w) / r) / q.log_abs))
        while abs(w / q.q ** j) > r:
            j += 1
    if j > MAX_CONTINUATION:
        raise NumericFailure(
            f"{j} continuation steps needed; increase the truncation order"
        )
    G = series.sum_series(w / q.q ** j)
    if j:
        C0inv = np.linalg.inv(series.C0)
        for i in range(j, 0, -1):
            G = series.local_matrix(w / q.q ** i) @ G @ C0inv
    if not np.all(np.isfinite(G)):
        raise NumericFailure(f"gauge evaluation overflowed at {z}")
    return (G, j) if return_steps else G


def product_solution_regular(A: RationalMatrixSystem, z, N: int = 5000) -> np.ndarray:
    """``A(z/q) A(z/q**2) ...`` for a system with ``A(0) = I``.

    The product stops once three successive factors are within 1e-16 of I.
    """
    A0 = A.at_zero()
    if np.linalg.norm(A0 - np.eye(A.n)) > 1e-10:
        raise ContractError("product solution requires A(0) = I")
    z = complex(z)
    q = A.q
    pts = singular_locus(A).distinct()
    d, p = spiral_distance(z, pts, q)
    if d < UNSAFE_RTOL:
        raise PoleProximityError(f"point {z} lies on the singular spiral through {p}", point=z, spiral=p)
    X = np.eye(A.n, dtype=complex)
    small = 0
    for i in range(1, N + 1):
        F = A(z / q.q ** i)
        X = X @ F
        small = small + 1 if np.linalg.norm(F - np.eye(A.n)) <= 1e-16 else 0
        if small >= 3:
            return X
    raise NumericFailure(f"regular product did not converge in {N} factors")
