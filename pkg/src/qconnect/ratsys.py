"""Rational functions, rational matrices and linear q-difference systems
``X(qz) = A(z) X(z)``.

Polynomials are ascending coefficient arrays handled with
:mod:`numpy.polynomial.polynomial`.  Common factors of numerator and
denominator are removed by matching roots, which is the only place where
floating-point tolerance enters the arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import AmbiguityError, ContractError, DomainError, NumericFailure
from .matfun import as_matrix, spectral_data
from .qcore import QParameter, annulus_decompose

__all__ = [
    "RationalFunction",
    "RationalMatrix",
    "RationalMatrixSystem",
    "SingularLocus",
    "Resonance",
    "FuchsianReport",
    "gauge_transform",
    "singular_locus",
    "is_strictly_fuchsian",
    "fuchsian_at",
    "resonance_classes",
    "normalize_nonresonant",
    "system_from_dict",
    "system_to_dict",
]

ROOT_MATCH_RTOL = 1e-8
MULTIPLICITY_RTOL = 1e-6
_TRIM_RTOL = 1e-14
# generic point used to pick pivots in rational elimination
_PROBE = 0.6180339887 + 0.4142135624j


def _trim(c):
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    if c.size == 0:
        return np.zeros(1, complex)
    big = np.abs(c).max()
    if big == 0:
        return np.zeros(1, complex)
    nz = np.nonzero(np.abs(c) > _TRIM_RTOL * big)[0]
    return c[: nz[-1] + 1].copy()


def _is_zero_poly(c):
    return c.size == 1 and c[0] == 0


def _roots(c):
    if c.size <= 1:
        return np.zeros(0, complex)
    r = P.polyroots(c)
    if not np.all(np.isfinite(r)):
        raise NumericFailure("polynomial root finding failed")
    return r


def _deflate(c, r):
    """Synthetic division by ``z - r``, remainder dropped."""
    n = c.size - 1
    out = np.empty(n, complex)
    acc = 0j
    for k in range(n, 0, -1):
        acc = c[k] + acc * r
        out[k - 1] = acc
    return out


def _vanishes_at(c, r) -> bool:
    mag = np.abs(c) * abs(r) ** np.arange(c.size)
    # the second term handles roots at (or extremely near) the origin
    return abs(P.polyval(r, c)) <= ROOT_MATCH_RTOL * mag.sum() + 1e-13 * np.abs(c).max()


class RationalFunction:
    """Quotient ``num/den`` of complex polynomials in z, den monic.

    The denominator is stored through its roots, which are carried along
    unchanged by the arithmetic; a common factor is detected by the
    numerator vanishing at one of them.

    Parameters
    ----------
    num, den : array_like
        Ascending coefficient lists.
    """

    __slots__ = ("num", "poles")

    def __init__(self, num, den=(1.0,), reduce: bool = True):
        den = _trim(den)
        if _is_zero_poly(den):
            raise DomainError("zero denominator")
        num = _trim(num) / den[-1]
        self._set(num, _roots(den), reduce)

    def _set(self, num, poles, reduce=True):
        num = _trim(num)
        poles = np.asarray(poles, dtype=complex)
        if _is_zero_poly(num):
            poles = np.zeros(0, complex)
        elif reduce and poles.size and num.size > 1:
            keep = []
            for r in poles:
                if num.size > 1 and _vanishes_at(num, r):
                    num = _trim(_deflate(num, r))
                else:
                    keep.append(r)
            poles = np.array(keep, dtype=complex)
        self.num = num
        self.poles = poles

    @classmethod
    def _from_parts(cls, num, poles, reduce=True):
        out = cls.__new__(cls)
        out._set(num, poles, reduce)
        return out

    @property
    def den(self) -> np.ndarray:
        if self.poles.size == 0:
            return np.ones(1, complex)
        return P.polyfromroots(self.poles).astype(complex)

    # constructors
    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls._from_parts([complex(c)], ())

    @classmethod
    def monomial(cls, k: int, c=1.0) -> "RationalFunction":
        if k >= 0:
            return cls._from_parts(np.r_[np.zeros(k), complex(c)], ())
        return cls._from_parts([complex(c)], np.zeros(-k))

    @classmethod
    def coerce(cls, x) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            return x
        return cls.constant(x)

    # structure
    def is_zero(self) -> bool:
        return _is_zero_poly(self.num)

    @property
    def deg_num(self) -> int:
        return -1 if self.is_zero() else self.num.size - 1

    @property
    def deg_den(self) -> int:
        return self.poles.size

    def _zero_poles(self) -> int:
        return int(np.sum(np.abs(self.poles) <= 1e-13))

    def valuation_zero(self) -> int:
        """Order of vanishing at 0 (negative for a pole); large for zero."""
        if self.is_zero():
            return 10 ** 6
        big = np.abs(self.num).max()
        low = int(np.nonzero(np.abs(self.num) > _TRIM_RTOL * big)[0][0])
        return low - self._zero_poles()

    def valuation_infty(self) -> int:
        """Order of vanishing at infinity in the variable 1/z."""
        if self.is_zero():
            return 10 ** 6
        return self.deg_den - self.deg_num

    def zeros(self):
        return _roots(self.num)

    # arithmetic
    def __add__(self, other):
        o = RationalFunction.coerce(other)
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        # least common denominator from the stored pole lists
        extra_o = []
        avail = list(self.poles)
        for r in o.poles:
            for i, s in enumerate(avail):
                if r == s:
                    avail.pop(i)
                    break
            else:
                extra_o.append(r)
        extra_s = list(avail)
        a = P.polymul(self.num, P.polyfromroots(extra_o)) if extra_o else self.num
        b = P.polymul(o.num, P.polyfromroots(extra_s)) if extra_s else o.num
        s = P.polyadd(a, b)
        scale = max(np.abs(a).max(), np.abs(b).max())
        if np.abs(s).max() <= 1e-13 * scale:
            return RationalFunction.constant(0.0)
        # drop cancellation noise below the input scale
        s = np.where(np.abs(s) <= 1e-15 * scale, 0, s)
        return RationalFunction._from_parts(s, np.r_[self.poles, extra_o])

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._from_parts(-self.num, self.poles, reduce=False)

    def __sub__(self, other):
        return self + (-RationalFunction.coerce(other))

    def __rsub__(self, other):
        return RationalFunction.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, RationalFunction):
            c = complex(other)
            if c == 0:
                return RationalFunction.constant(0.0)
            return RationalFunction._from_parts(self.num * c, self.poles, reduce=False)
        if self.is_zero() or other.is_zero():
            return RationalFunction.constant(0.0)
        f = RationalFunction._from_parts(P.polymul(self.num, other.num), self.poles, reduce=True)
        return RationalFunction._from_parts(f.num, np.r_[f.poles, other.poles], reduce=True)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise DomainError("division by the zero rational function")
        lead = self.num[-1]
        return RationalFunction._from_parts(self.den / lead, _roots(self.num), reduce=False)

    def __truediv__(self, other):
        if not isinstance(other, RationalFunction):
            c = complex(other)
            if c == 0:
                raise DomainError("division by zero")
            return self * (1.0 / c)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other) * self.inverse()

    # evaluation and substitution
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        d = np.ones_like(z)
        for r in self.poles:
            d = d * (z - r)
        out = P.polyval(z, self.num) / d
        return complex(out) if out.ndim == 0 else out

    def value_at_zero(self) -> complex:
        if self.valuation_zero() < 0:
            raise DomainError("pole at 0")
        return complex(self.taylor(0)[0])

    def value_at_infinity(self) -> complex:
        v = self.valuation_infty()
        if v < 0:
            raise DomainError("pole at infinity")
        return complex(self.num[-1]) if v == 0 else 0j

    def sigma(self, q) -> "RationalFunction":
        """The function ``z -> f(q z)``."""
        q = complex(q)
        num = self.num * q ** np.arange(self.num.size) / q ** self.poles.size
        return RationalFunction._from_parts(num, self.poles / q, reduce=False)

    def taylor(self, K: int) -> np.ndarray:
        """Coefficients ``c_0..c_K`` of the expansion at 0."""
        if self.valuation_zero() < 0:
            raise DomainError("pole at 0")
        return _series_div(self.num, self.den, K)

    def taylor_infty(self, K: int) -> np.ndarray:
        """Coefficients ``d_0..d_K`` with ``f(z) = sum d_k z**-k`` near infinity."""
        shift = self.valuation_infty()
        if shift < 0:
            raise DomainError("pole at infinity")
        out = np.zeros(K + 1, complex)
        if self.is_zero() or shift > K:
            return out
        out[shift:] = _series_div(self.num[::-1], self.den[::-1], K - shift)
        return out

    def allclose(self, other, tol: float = 1e-10) -> bool:
        """Coefficientwise comparison of the cross products."""
        o = RationalFunction.coerce(other)
        a = P.polymul(self.num, o.den)
        b = P.polymul(o.num, self.den)
        n = max(a.size, b.size)
        a = np.pad(a, (0, n - a.size))
        b = np.pad(b, (0, n - b.size))
        scale = max(1.0, np.abs(a).max(), np.abs(b).max())
        return bool(np.abs(a - b).max() <= tol * scale)

    def __repr__(self):
        return f"RationalFunction(num={self.num.tolist()}, den={self.den.tolist()})"


def _series_div(num, den, K):
    num = np.pad(num, (0, max(0, K + 1 - num.size)))[: K + 1]
    den = np.asarray(den)
    k0 = 0
    while den[k0] == 0:
        k0 += 1
    # strip the common power of z
    num = np.pad(num[k0:], (0, k0)) if k0 else num
    den = den[k0:]
    out = np.zeros(K + 1, complex)
    d0 = den[0]
    for k in range(K + 1):
        s = num[k]
        jmax = min(k, den.size - 1)
        if jmax:
            s -= np.dot(den[1:jmax + 1], out[k - 1::-1][:jmax])
        out[k] = s / d0
    return out


class RationalMatrix:
    """Matrix with :class:`RationalFunction` entries."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        E = np.empty((len(entries), len(entries[0])), dtype=object)
        for i, row in enumerate(entries):
            if len(row) != E.shape[1]:
                raise DomainError("ragged rational matrix")
            for j, x in enumerate(row):
                E[i, j] = RationalFunction.coerce(x)
        self.entries = E

    @classmethod
    def _wrap(cls, E):
        out = cls.__new__(cls)
        out.entries = E
        return out

    @classmethod
    def constant(cls, M) -> "RationalMatrix":
        M = as_matrix(M)
        return cls([[M[i, j] for j in range(M.shape[1])] for i in range(M.shape[0])])

    @classmethod
    def identity(cls, n) -> "RationalMatrix":
        return cls.constant(np.eye(n))

    @classmethod
    def diag(cls, fs) -> "RationalMatrix":
        n = len(fs)
        return cls([[fs[i] if i == j else 0.0 for j in range(n)] for i in range(n)])

    @property
    def shape(self):
        return self.entries.shape

    def __getitem__(self, ij):
        return self.entries[ij]

    def __matmul__(self, other):
        if not isinstance(other, RationalMatrix):
            other = RationalMatrix.constant(other)
        n, m = self.shape
        m2, p = other.shape
        if m != m2:
            raise DomainError("shape mismatch")
        E = np.empty((n, p), dtype=object)
        for i in range(n):
            for j in range(p):
                acc = RationalFunction([0.0])
                for k in range(m):
                    a, b = self.entries[i, k], other.entries[k, j]
                    if not (a.is_zero() or b.is_zero()):
                        acc = acc + a * b
                E[i, j] = acc
        return RationalMatrix._wrap(E)

    def __rmatmul__(self, other):
        return RationalMatrix.constant(other) @ self

    def _map(self, f):
        E = np.empty(self.shape, dtype=object)
        for idx in np.ndindex(self.shape):
            E[idx] = f(self.entries[idx])
        return RationalMatrix._wrap(E)

    def __add__(self, other):
        if not isinstance(other, RationalMatrix):
            other = RationalMatrix.constant(other)
        E = self.entries + other.entries
        return RationalMatrix._wrap(E)

    def __sub__(self, other):
        if not isinstance(other, RationalMatrix):
            other = RationalMatrix.constant(other)
        return self + other._map(lambda f: -f)

    def scale(self, c):
        return self._map(lambda f: f * c)

    def sigma(self, q) -> "RationalMatrix":
        return self._map(lambda f: f.sigma(q))

    def __call__(self, z) -> np.ndarray:
        z = complex(z)
        out = np.empty(self.shape, complex)
        for idx in np.ndindex(self.shape):
            out[idx] = self.entries[idx](z)
        return out

    def value_at_zero(self):
        return np.array([[f.value_at_zero() for f in row] for row in self.entries])

    def value_at_infinity(self):
        return np.array([[f.value_at_infinity() for f in row] for row in self.entries])

    def taylor(self, K) -> np.ndarray:
        """Array of shape (K+1, n, m) of Taylor coefficients at 0."""
        out = np.empty((K + 1,) + self.shape, complex)
        for (i, j) in np.ndindex(self.shape):
            out[:, i, j] = self.entries[i, j].taylor(K)
        return out

    def taylor_infty(self, K) -> np.ndarray:
        out = np.empty((K + 1,) + self.shape, complex)
        for (i, j) in np.ndindex(self.shape):
            out[:, i, j] = self.entries[i, j].taylor_infty(K)
        return out

    def _eliminate(self, rhs=None):
        """Gauss-Jordan elimination; returns (det, inverse or None)."""
        n, m = self.shape
        if n != m:
            raise DomainError("square matrix required")
        A = self.entries.copy()
        B = RationalMatrix.identity(n).entries.copy() if rhs else None
        det = RationalFunction([1.0])
        for col in range(n):
            best, best_val = None, -1.0
            for r in range(col, n):
                f = A[r, col]
                if f.is_zero():
                    continue
                v = abs(f(_PROBE))
                if v > best_val:
                    best, best_val = r, v
            if best is None:
                return RationalFunction([0.0]), None
            if best != col:
                A[[col, best]] = A[[best, col]]
                if B is not None:
                    B[[col, best]] = B[[best, col]]
                det = -det
            piv = A[col, col]
            det = det * piv
            pinv = piv.inverse()
            for j in range(n):
                A[col, j] = A[col, j] * pinv
                if B is not None:
                    B[col, j] = B[col, j] * pinv
            for r in range(n):
                if r == col or A[r, col].is_zero():
                    continue
                f = A[r, col]
                for j in range(n):
                    if not A[col, j].is_zero():
                        A[r, j] = A[r, j] - f * A[col, j]
                    if B is not None and not B[col, j].is_zero():
                        B[r, j] = B[r, j] - f * B[col, j]
        return det, (RationalMatrix._wrap(B) if B is not None else None)

    def det(self) -> RationalFunction:
        return self._eliminate(False)[0]

    def inv(self) -> "RationalMatrix":
        det, inv = self._eliminate(True)
        if inv is None or det.is_zero():
            raise DomainError("rational matrix is singular")
        return inv

    def allclose(self, other, tol: float = 1e-10) -> bool:
        if not isinstance(other, RationalMatrix):
            other = RationalMatrix.constant(other)
        if self.shape != other.shape:
            return False
        return all(self.entries[ix].allclose(other.entries[ix], tol) for ix in np.ndindex(self.shape))

    def __repr__(self):
        return f"RationalMatrix(shape={self.shape})"


@dataclass(frozen=True)
class RationalMatrixSystem:
    """The system ``X(qz) = A(z) X(z)`` with ``A`` in ``GL_n(C(z))``."""

    A: RationalMatrix
    q: QParameter
    _det: RationalFunction = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        A = self.A if isinstance(self.A, RationalMatrix) else RationalMatrix(self.A)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "q", QParameter.coerce(self.q))
        n, m = A.shape
        if n != m:
            raise DomainError("system matrix must be square")
        d = A.det()
        if d.is_zero():
            raise DomainError("det A is identically zero")
        object.__setattr__(self, "_det", d)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def det(self) -> RationalFunction:
        return self._det

    def __call__(self, z) -> np.ndarray:
        return self.A(z)

    def at_zero(self) -> np.ndarray:
        return self.A.value_at_zero()

    def at_infinity(self) -> np.ndarray:
        return self.A.value_at_infinity()


def gauge_transform(A: RationalMatrixSystem, F, F_inv=None) -> RationalMatrixSystem:
    """Gauge transform ``F(qz)^-1 A(z) F(z)``.

    ``F_inv`` may supply the inverse of F when it is known in closed form.
    """
    if not isinstance(F, RationalMatrix):
        F = RationalMatrix(F) if isinstance(F, (list, tuple)) else RationalMatrix.constant(F)
    if F.shape != (A.n, A.n):
        raise DomainError("gauge matrix has the wrong shape")
    if F_inv is None:
        F_inv = F.inv()
    return RationalMatrixSystem(F_inv.sigma(A.q.q) @ A.A @ F, A.q)


class SingularLocus(NamedTuple):
    """Singularities in C* (with multiplicity) plus flags for 0 and infinity."""

    points: tuple
    at_zero: bool
    at_infinity: bool

    def modulo_q(self, q) -> list:
        """One representative per q-spiral, chosen in ``1 <= |c| < |q|``."""
        q = QParameter.coerce(q)
        reps = []
        for p in self.points:
            c = annulus_decompose(p, q).cbar
            if not any(_spiral_close(c, r, q) for r in reps):
                reps.append(c)
        return reps

    def distinct(self) -> list:
        out = []
        for p in self.points:
            if not any(abs(p - r) <= MULTIPLICITY_RTOL * max(1.0, abs(r)) for r in out):
                out.append(p)
        return out


def _spiral_close(a, b, q):
    da = annulus_decompose(a / b, q).cbar
    return min(abs(da - 1), abs(da - q.q) / abs(q.q)) <= MULTIPLICITY_RTOL


def singular_locus(A: RationalMatrixSystem) -> SingularLocus:
    """Poles of the entries of A and zeros of det A, split off 0 and infinity."""
    pts = []
    zero_flag = False
    inf_flag = False
    for f in A.A.entries.flat:
        for r in f.poles:
            pts.append(r)
        if f.valuation_infty() < 0:
            inf_flag = True
    d = A.det
    pts.extend(d.zeros())
    if d.valuation_infty() != 0:
        inf_flag = True
    out = []
    # multiple roots are found as tight clusters; snap them to the mean
    clusters = []
    for r in pts:
        for c in clusters:
            if abs(r - c[0]) <= MULTIPLICITY_RTOL * max(1.0, abs(c[0])):
                c.append(r)
                break
        else:
            clusters.append([r])
    for c in clusters:
        m = complex(np.mean(c))
        if abs(m) <= 1e-12:
            zero_flag = True
            continue
        out.extend([m] * len(c))
    return SingularLocus(tuple(out), zero_flag, inf_flag)


class FuchsianReport(NamedTuple):
    ok: bool
    diagnostics: tuple

    def __bool__(self):
        return self.ok


def fuchsian_at(A: RationalMatrixSystem, at) -> FuchsianReport:
    """Whether ``A(pt)`` is finite and invertible for ``pt`` in {0, 'inf'}."""
    label = "0" if at == 0 else "infinity"
    try:
        M = A.at_zero() if at == 0 else A.at_infinity()
    except DomainError:
        return FuchsianReport(False, (f"pole at {label}",))
    scale = max(1.0, np.linalg.norm(M, 2)) ** A.n
    if abs(np.linalg.det(M)) <= 1e-10 * scale:
        return FuchsianReport(False, (f"A({label}) is singular",))
    return FuchsianReport(True, ())


def is_strictly_fuchsian(A: RationalMatrixSystem) -> FuchsianReport:
    """True iff ``A(0)`` and ``A(inf)`` are finite and invertible."""
    r0 = fuchsian_at(A, 0)
    r1 = fuchsian_at(A, "inf")
    return FuchsianReport(r0.ok and r1.ok, r0.diagnostics + r1.diagnostics)


class Resonance(NamedTuple):
    """Distinct eigenvalues with ``values[i] = q**k * values[j]``."""

    i: int
    j: int
    k: int
    ci: complex
    cj: complex


def resonance_classes(A0, q, max_shift: int | None = None) -> list:
    """All pairs of distinct eigenvalues of A0 congruent modulo ``q**Z``.

    Indices refer to the distinct eigenvalues in the order produced by
    :func:`qconnect.matfun.spectral_data`.
    """
    q = QParameter.coerce(q)
    vals = spectral_data(as_matrix(A0)).values
    mods = [abs(v) for v in vals]
    bound = int(np.ceil(np.log(max(mods) / min(mods)) / q.log_abs)) + 1
    if max_shift is None:
        max_shift = bound
    out = []
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            k = int(round(np.log(mods[i] / mods[j]) / q.log_abs))
            if k == 0 or abs(k) > max_shift:
                continue
            qk = q.int_power(k)
            if abs(vals[i] - qk * vals[j]) <= 1e-8 * abs(vals[i]):
                out.append(Resonance(i, j, k, vals[i], vals[j]))
    return out


def _shear(A: RationalMatrixSystem, Q, Qinv, idx, m, at):
    """Gauge by ``Q diag(z**m on idx, 1 elsewhere) Q^-1``."""
    n = A.n
    d = [RationalFunction.monomial(m) if i in idx else RationalFunction([1.0]) for i in range(n)]
    di = [RationalFunction.monomial(-m) if i in idx else RationalFunction([1.0]) for i in range(n)]
    F = RationalMatrix.constant(Q) @ RationalMatrix.diag(d) @ RationalMatrix.constant(Qinv)
    Fi = RationalMatrix.constant(Q) @ RationalMatrix.diag(di) @ RationalMatrix.constant(Qinv)
    return gauge_transform(A, F, Fi), F


def normalize_nonresonant(A: RationalMatrixSystem, at=0, max_steps: int = 200):
    """Shear A until its exponents at ``at`` lie in ``1 <= |c| < |q|``.

    Returns
    -------
    (RationalMatrixSystem, RationalMatrix)
        The new system and the gauge F with ``A' = gauge_transform(A, F)``.
        Exponents in the fundamental annulus cannot be congruent modulo
        ``q**Z`` unless equal, so the output is non-resonant.
    """
    if at not in (0, "inf"):
        raise ContractError("at must be 0 or 'inf'")
    if not fuchsian_at(A, at):
        raise ContractError(f"system is not strictly fuchsian at {at}")
    q = A.q
    F = RationalMatrix.identity(A.n)
    for _ in range(max_steps):
        M = A.at_zero() if at == 0 else A.at_infinity()
        sd = spectral_data(M)
        eps = [annulus_decompose(v, q).epsilon for v in sd.values]
        if all(e == 0 for e in eps):
            if resonance_classes(M, q):
                raise AmbiguityError("annulus exponents still resonant")
            return A, F
        b = int(np.argmax([abs(e) for e in eps]))
        start = sum(sd.sizes[:b])
        idx = set(range(start, start + sd.sizes[b]))
        # z**m multiplies the block exponent by q**-m, both at 0 and at infinity
        m = 1 if eps[b] > 0 else -1
        A, Fi = _shear(A, sd.Q, sd.Qinv, idx, m, at)
        F = F @ Fi
        if not fuchsian_at(A, at):
            raise NumericFailure("shearing step lost the fuchsian property")
    raise NumericFailure("shearing did not reach the fundamental annulus")


def _poly_from_pairs(pairs):
    return [complex(p[0], p[1]) if isinstance(p, (list, tuple)) else complex(p) for p in pairs]


def system_from_dict(doc: dict) -> RationalMatrixSystem:
    """Parse the JSON system format.

    ``{"tau": [re, im]} or {"q": [re, im]}`` plus
    ``"matrix": [[{"num": [[re, im], ...], "den": [...]}, ...], ...]``.
    Coefficients are ascending in z; ``den`` defaults to ``[[1, 0]]``.
    """
    if "tau" in doc:
        t = doc["tau"]
        q = QParameter.from_tau(complex(*t) if isinstance(t, (list, tuple)) else complex(t))
    elif "q" in doc:
        t = doc["q"]
        q = QParameter.from_q(complex(*t) if isinstance(t, (list, tuple)) else complex(t))
    else:
        raise DomainError("system file needs tau or q")
    try:
        rows = doc["matrix"]
        entries = [
            [
                RationalFunction(_poly_from_pairs(e["num"]), _poly_from_pairs(e.get("den", [[1, 0]])))
                for e in row
            ]
            for row in rows
        ]
    except (KeyError, TypeError, IndexError) as exc:
        raise DomainError(f"malformed system matrix: {exc}") from exc
    if not entries or any(len(r) != len(entries) for r in entries):
        raise DomainError("system matrix must be square and nonempty")
    return RationalMatrixSystem(RationalMatrix(entries), q)


def system_to_dict(A: RationalMatrixSystem) -> dict:
    def pairs(c):
        return [[float(x.real), float(x.imag)] for x in c]

    return {
        "tau": [A.q.tau.real, A.q.tau.imag],
        "matrix": [
            [{"num": pairs(f.num), "den": pairs(f.den)} for f in row] for row in A.A.entries
        ],
    }
