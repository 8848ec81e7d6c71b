"""Connection data of a fuchsian system: the triple ``(A0, M, Ainf)``.

``M = (M_inf)**-1 M_0`` glues the local gauges at 0 and infinity and
satisfies ``M(qz) A0 = Ainf M(z)``.  Dividing out the matrix characters
gives the elliptic connection matrix ``P = e_{Ainf}**-1 M e_{A0}``, and the
twisted variant ``Pbreve`` replaces the characters by the q-killing twists
``g_a`` so that its values transform by ``gamma_1`` under ``a -> qa``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import cmath

import numpy as np

from .errors import ContractError, DomainError, NumericFailure, PoleProximityError, ResonanceError
from .flatcat import FlatObject
from .matfun import apply_to_ss, e_matrix, Phi_cocycle, kron, unipotent_pow, is_identity
from .qcore import QParameter, char_eval, g_char
from .ratsys import (
    RationalFunction,
    RationalMatrix,
    RationalMatrixSystem,
    fuchsian_at,
    normalize_nonresonant,
    resonance_classes,
    singular_locus,
)
from .reduction import DEFAULT_K, UNSAFE_RTOL, eval_gauge, reduce_at_infty, reduce_at_zero, spiral_distance
from .thetafn import DEFAULT_TOL, SeriesTolerance, log_theta, psi, qlog

__all__ = [
    "ConnectionTriple",
    "build_triple",
    "unit_triple",
    "tensor_triple",
    "connection_P",
    "gamma_path",
    "pbreve",
    "pbreve_expanded",
    "connection_group_sample",
    "twisted_tensor_check",
    "rank1_regular_p",
    "rank2_unipotent_p",
]


@dataclass(frozen=True)
class ConnectionTriple:
    """Local constant forms and the meromorphic intertwiner between them.

    Attributes
    ----------
    A0, Ainf : FlatObject
    M_fn : callable
        Unguarded evaluator ``z -> M(z)``.
    sigma_set : tuple
        Points whose q-spirals carry the singularities of M.
    exponent_group_gens : tuple
        Eigenvalues of ``A0`` and ``Ainf``.
    gauge : RationalMatrix or None
        Normalizing gauge applied to the input system, if any.
    """

    A0: FlatObject
    Ainf: FlatObject
    M_fn: Callable = field(repr=False)
    sigma_set: tuple = ()
    exponent_group_gens: tuple = ()
    gauge: object = field(default=None, repr=False)

    @property
    def q(self) -> QParameter:
        return self.A0.q

    @property
    def n(self) -> int:
        return self.A0.n

    def check_safe(self, z):
        d, p = spiral_distance(z, self.sigma_set, self.q)
        if d < UNSAFE_RTOL:
            raise PoleProximityError(
                f"point {complex(z)} lies on the singular spiral through {p}",
                point=complex(z),
                spiral=p,
            )

    def M(self, z, guard: bool = True) -> np.ndarray:
        z = complex(z)
        if z == 0:
            raise DomainError("M is evaluated on C* only")
        if guard:
            self.check_safe(z)
        return self.M_fn(z)

    __call__ = M

    def intertwining_residual(self, z) -> float:
        """``||M(qz) A0 - Ainf M(z)||`` relative to ``||Ainf M(z)||``."""
        rhs = self.Ainf.A @ self.M(z)
        lhs = self.M(self.q.q * z) @ self.A0.A
        return float(np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(rhs)))


def build_triple(A: RationalMatrixSystem, K: int = DEFAULT_K, normalize: bool = True) -> ConnectionTriple:
    """Connection triple of a system strictly fuchsian at 0 and infinity.

    If ``A(0)`` is resonant and ``normalize`` is set, the system is first
    sheared at 0; the gauge used is stored on the triple.

    Raises
    ------
    ContractError
        If A is not strictly fuchsian at both ends.
    ResonanceError
        If a resonance at infinity remains.
    """
    for pt in (0, "inf"):
        rep = fuchsian_at(A, pt)
        if not rep:
            raise ContractError("; ".join(rep.diagnostics))
    q = A.q
    F = None
    if resonance_classes(A.at_zero(), q):
        if not normalize:
            raise ResonanceError("A(0) is resonant")
        A, F = normalize_nonresonant(A, 0)
        if not fuchsian_at(A, "inf"):
            raise ContractError("normalization at 0 destroyed the fuchsian property at infinity")
    res = resonance_classes(A.at_infinity(), q)
    if res:
        r = res[0]
        raise ResonanceError(f"A(inf) is resonant: {r.ci} = q^{r.k} {r.cj}", pair=(r.ci, r.cj))
    s0 = reduce_at_zero(A, K)
    si = reduce_at_infty(A, K)

    def M_fn(z):
        return np.linalg.solve(eval_gauge(si, z, guard=False), eval_gauge(s0, z, guard=False))

    gens = tuple(np.linalg.eigvals(s0.A0.A)) + tuple(np.linalg.eigvals(si.A0.A))
    return ConnectionTriple(s0.A0, si.A0, M_fn, s0.singular_points, gens, F)


def unit_triple(q, n: int = 1) -> ConnectionTriple:
    """The triple of the trivial system ``X(qz) = X(z)``."""
    q = QParameter.coerce(q)
    I = FlatObject.of(np.eye(n), q)
    return ConnectionTriple(I, I, lambda z: np.eye(n, dtype=complex), (), (1.0,) * (2 * n))


def tensor_triple(t1: ConnectionTriple, t2: ConnectionTriple) -> ConnectionTriple:
    """Tensor product ``(A0 (x) B0, M1 (x) M2, Ainf (x) Binf)``."""
    q = t1.q
    A0 = FlatObject.of(kron(t1.A0.A, t2.A0.A), q)
    Ai = FlatObject.of(kron(t1.Ainf.A, t2.Ainf.A), q)

    def M_fn(z):
        return kron(t1.M_fn(z), t2.M_fn(z))

    gens = tuple(a * b for a in t1.exponent_group_gens for b in t2.exponent_group_gens)
    return ConnectionTriple(A0, Ai, M_fn, tuple(t1.sigma_set) + tuple(t2.sigma_set), gens)


def connection_P(t: ConnectionTriple, z, tol: SeriesTolerance = DEFAULT_TOL, shifted: bool = False) -> np.ndarray:
    """Elliptic connection matrix ``e_{Ainf}(z)**-1 M(z) e_{A0}(z)``."""
    q = t.q
    M = t.M(z)
    E0 = e_matrix(t.A0.A, z, q, tol, shifted=shifted)
    Ei = e_matrix(t.Ainf.A, z, q, tol, shifted=shifted)
    return np.linalg.solve(Ei, M @ E0)


def gamma_path(t: ConnectionTriple, z0) -> np.ndarray:
    """The path value ``M(z0)``; refused where M is numerically singular."""
    M = t.M(z0)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= 1e-10 * max(1.0, sv[0]):
        raise NumericFailure(f"M({complex(z0)}) is singular; z0 lies in the singular set")
    return M


def pbreve(t: ConnectionTriple, a, tol: SeriesTolerance = DEFAULT_TOL) -> np.ndarray:
    """Twisted connection matrix ``psi_a(Ainf_s)**-1 P(a) psi_a(A0_s)``."""
    q = t.q
    P = connection_P(t, a, tol)
    R0 = apply_to_ss(lambda c: psi(a, c, q, tol), t.A0.A)
    Ri = apply_to_ss(lambda c: psi(a, c, q, tol), t.Ainf.A)
    return np.linalg.solve(Ri, P @ R0)


def pbreve_expanded(t: ConnectionTriple, a, tol: SeriesTolerance = DEFAULT_TOL) -> np.ndarray:
    """``g_a(Ainf_s)**-1 Ainf_u**-l M(a) A0_u**l g_a(A0_s)`` with ``l = l_q(a)``.

    Equal to :func:`pbreve`; this form avoids the theta quotients of the
    semi-simple parts.
    """
    q = t.q
    g = g_char(a, q)
    G0 = apply_to_ss(lambda c: char_eval(g, c, q), t.A0.A)
    Gi = apply_to_ss(lambda c: char_eval(g, c, q), t.Ainf.A)
    M = t.M(a)
    need_log = not (is_identity(t.A0.u, 1e-10) and is_identity(t.Ainf.u, 1e-10))
    l = qlog(a, q, tol) if need_log else 0.0
    U0 = unipotent_pow(t.A0.u, l)
    Ui = unipotent_pow(t.Ainf.u, -l)
    return np.linalg.solve(Gi, Ui @ M @ U0 @ G0)


def connection_group_sample(t: ConnectionTriple, points, twisted: bool = False,
                            tol: SeriesTolerance = DEFAULT_TOL) -> list:
    """``V(a_i)**-1 V(a_{i+1})`` for consecutive points, V = P or Pbreve."""
    f = pbreve if twisted else connection_P
    vals = [f(t, a, tol) for a in points]
    return [np.linalg.solve(vals[i], vals[i + 1]) for i in range(len(vals) - 1)]


def twisted_tensor_check(t1: ConnectionTriple, t2: ConnectionTriple, z,
                         tol: SeriesTolerance = DEFAULT_TOL) -> float:
    """``||P_12 - Phi(Ainf) (P_1 (x) P_2) Phi(A0)**-1||`` at z."""
    q = t1.q
    t12 = tensor_triple(t1, t2)
    P12 = connection_P(t12, z, tol)
    Pi = Phi_cocycle(t1.Ainf.A, t2.Ainf.A, z, q, tol)
    P0 = Phi_cocycle(t1.A0.A, t2.A0.A, z, q, tol)
    rhs = Pi @ kron(connection_P(t1, z, tol), connection_P(t2, z, tol)) @ np.linalg.inv(P0)
    return float(np.linalg.norm(P12 - rhs))


def rank1_regular_p(u, v, z, q, tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """Closed form ``prod u_i T(z/u_i) / (v_i T(z/v_i))`` with ``T(x) = Theta(-x)``.

    It is the elliptic connection function of ``a(z) = prod (1 - z/u_i)/(1 - z/v_i)``
    up to a constant factor.
    """
    q = QParameter.coerce(q)
    u = [complex(x) for x in u]
    v = [complex(x) for x in v]
    if len(u) != len(v):
        raise DomainError("u and v must have equal length")
    pu, pv = np.prod(u), np.prod(v)
    if abs(pu - pv) > 1e-10 * max(1.0, abs(pu)):
        raise DomainError("regularity requires prod(u) = prod(v)")
    z = complex(z)
    s = 0j
    for x in v:
        if spiral_distance(z, [x], q)[0] < 1e-8:
            raise PoleProximityError(f"z = {z} lies on the pole spiral through {x}", point=z, spiral=x)
    for x in u:
        if spiral_distance(z, [x], q)[0] < 1e-8:
            return 0j
    for a, b in zip(u, v):
        s += log_theta(-z / a, q, tol) - log_theta(-z / b, q, tol)
    return complex(pu / pv * cmath.exp(s))


def rank2_unipotent_p(a: RationalFunction, z, q, N: int = 2000) -> complex:
    """Bilateral sum ``sum_n a(q**n z)`` for a rational a vanishing at 0 and infinity."""
    q = QParameter.coerce(q)
    a = RationalFunction.coerce(a)
    if a.valuation_zero() < 1 or a.valuation_infty() < 1:
        raise DomainError("the bilateral sum needs a(0) = a(inf) = 0")
    z = complex(z)
    if a.deg_den and spiral_distance(z, list(a.poles), q)[0] < 1e-8:
        raise PoleProximityError(f"z = {z} lies on a pole spiral of a", point=z)
    total = a(z)
    scale = abs(total)
    for sgn in (1, -1):
        small = 0
        for n in range(1, N + 1):
            t = a(z * q.q ** (sgn * n))
            total += t
            scale = max(scale, abs(t))
            small = small + 1 if abs(t) <= 1e-14 * max(scale, 1e-300) else 0
            if small >= 3:
                break
        else:
            raise NumericFailure("bilateral sum did not converge")
    return complex(total)
