"""Jacobi theta function of base q and the functions built from it.

The theta function used throughout is the bilateral series::

    Theta(z) = sum_n q**(-n(n-1)/2) * z**n

It satisfies ``Theta(q z) = THETA_SIGN * q z * Theta(z)`` with
``THETA_SIGN = +1`` and vanishes (simply) exactly on the spiral ``-q**Z``.

Evaluation strategy
-------------------
``z`` is first moved into the fundamental annulus ``1 <= |z| < |q|`` with the
functional equation.  Writing ``z = exp(2i pi x)`` the series becomes the
classical ``sum exp(i pi tau n**2 + 2i pi n w)`` with ``w = x - tau/2``.  When
``Im(tau)`` is small the terms are large and cancel, so the pair ``(w, tau)``
is carried to the standard fundamental domain with ``tau -> tau + 1`` and the
imaginary transformation ``tau -> -1/tau`` before summing.  All quantities are
handled as logarithms, which keeps ratios such as ``Theta(z)/Theta(z/c)``
accurate even when both factors under- or overflow.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericFailure, PoleProximityError
from .qcore import QParameter, annulus_decompose, char_eval, g_char

__all__ = [
    "THETA_SIGN",
    "SeriesTolerance",
    "DEFAULT_TOL",
    "log_theta",
    "theta",
    "qlog",
    "qchar",
    "cocycle_phi",
    "psi",
    "theta_zero_distance",
]

THETA_SIGN = 1

# relative distance to a zero spiral below which evaluation is refused
POLE_GUARD = 1e-8

_TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class SeriesTolerance:
    """Truncation control for the theta series.

    ``target`` bounds the neglected tail relative to the largest retained
    term; ``max_terms`` caps the number of terms summed on each side.
    """

    target: float = 1e-15
    max_terms: int = 200

    def __post_init__(self):
        if not self.target >= 1e-15:
            raise DomainError("SeriesTolerance.target must be >= 1e-15")
        if not (0 < self.max_terms <= 200):
            raise DomainError("SeriesTolerance.max_terms must be in 1..200")


DEFAULT_TOL = SeriesTolerance()


def _reduce_to_fundamental(w: complex, tau: complex, max_iter: int = 64):
    """Move ``theta(w, tau)`` to a parameter with ``Im(tau) >= sqrt(3)/2``.

    Returns ``(w, tau, log_prefactor, dlog_offset, chain)`` such that
    ``log theta(w0, tau0) = log_prefactor + log theta(w, tau)`` and
    ``d/dw0 log theta = dlog_offset + chain * (d/dw log theta)(w, tau)``.
    """
    lp = 0j
    dp = 0j
    chain = 1 + 0j
    for _ in range(max_iter):
        k = round(tau.real)
        if k:
            tau = tau - k
            w = w + k / 2.0
        if abs(tau) >= 1.0 or tau.imag >= 1.0:
            return w, tau, lp, dp, chain
        lp += -0.5 * cmath.log(-1j * tau) - 1j * math.pi * w * w / tau
        dp += chain * (-2j * math.pi * w / tau)
        chain = chain / tau
        w = w / tau
        tau = -1.0 / tau
    raise NumericFailure("modular reduction of tau did not terminate")


def _log_sum_direct(w: complex, tau: complex, tol: SeriesTolerance, derivative: bool):
    """``log sum exp(i pi tau n^2 + 2 i pi n w)`` around its dominant term."""
    center = int(round(-w.imag / tau.imag))
    log_target = math.log(tol.target)
    lo = hi = 0
    # terms decay like exp(-pi Im(tau) m^2) away from the peak; grow the
    # window until the outermost retained terms are below target
    step = max(4, int(math.ceil(math.sqrt(-log_target / (math.pi * tau.imag)))) + 2)
    while True:
        lo = min(lo + step, tol.max_terms)
        hi = lo
        n = np.arange(center - lo, center + hi + 1, dtype=float)
        expo = 1j * math.pi * tau * n * n + _TWO_PI_I * n * w
        peak = expo.real.max()
        rel = expo.real - peak
        if rel[0] < log_target - 2 and rel[-1] < log_target - 2:
            break
        if lo >= tol.max_terms:
            raise NumericFailure(
                f"theta series did not converge within {tol.max_terms} terms"
            )
    # geometric tail bound beyond each end, relative to the peak term
    for end, nxt in ((0, 1), (-1, -2)):
        ratio = math.exp(rel[end] - rel[nxt]) if rel[nxt] > -700 else 0.0
        if ratio >= 1.0:
            raise NumericFailure("theta tail is not geometrically dominated")
        tail = math.exp(rel[end]) * ratio / (1.0 - ratio)
        if tail > tol.target:
            raise NumericFailure("theta tail bound exceeds target")
    terms = np.exp(expo - peak)
    s = terms.sum()
    if s == 0:
        raise PoleProximityError("theta series vanished at evaluation point")
    log_s = peak + cmath.log(s)
    if not derivative:
        return log_s, None
    d = (_TWO_PI_I * n * terms).sum() / s
    return log_s, d


def _log_theta_annulus(zbar: complex, q: QParameter, tol: SeriesTolerance, derivative: bool):
    x = cmath.log(zbar) / _TWO_PI_I
    w0 = x - q.tau / 2
    w, tau, lp, dp, chain = _reduce_to_fundamental(w0, q.tau)
    ls, d = _log_sum_direct(w, tau, tol, derivative)
    log_val = lp + ls
    if not derivative:
        return log_val, None
    # l_q = z d/dz log Theta = (1/2i pi) d/dx log Theta
    return log_val, (dp + chain * d) / _TWO_PI_I


def theta_zero_distance(z, q) -> float:
    """Relative distance from z to the zero spiral ``-q**Z`` of Theta."""
    q = QParameter.coerce(q)
    d = annulus_decompose(-complex(z), q)
    return min(abs(d.cbar - 1.0), abs(d.cbar - q.q) / abs(q.q))


def _log_theta_full(z, q: QParameter, tol: SeriesTolerance, derivative: bool):
    z = complex(z)
    if z == 0:
        raise DomainError("theta is evaluated on C* only")
    dec = annulus_decompose(z, q)
    m = dec.epsilon
    log_bar, l_bar = _log_theta_annulus(dec.cbar, q, tol, derivative)
    # Theta(q^m z) = q^(m(m+1)/2) z^m Theta(z)
    log_val = log_bar + (m * (m + 1) // 2) * q.log + m * cmath.log(dec.cbar)
    if not derivative:
        return log_val, None
    return log_val, l_bar + m


def log_theta(z, q, tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """Logarithm of ``Theta_q(z)`` (imaginary part defined modulo 2 pi)."""
    q = QParameter.coerce(q)
    return _log_theta_full(z, q, tol, False)[0]


def theta(z, q, tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """Jacobi's theta function ``sum_n q**(-n(n-1)/2) z**n``.

    Parameters
    ----------
    z : complex, nonzero
    q : QParameter or complex with ``|q| > 1``
    tol : SeriesTolerance

    Returns
    -------
    complex
        Points of the zero spiral ``-q**Z`` (after annulus reduction) return
        exactly 0.
    """
    q = QParameter.coerce(q)
    if theta_zero_distance(z, q) == 0.0:
        return 0j
    return cmath.exp(log_theta(z, q, tol))


def _guard(z, q, what):
    if theta_zero_distance(z, q) < POLE_GUARD:
        raise PoleProximityError(
            f"{what}: point {complex(z)} lies on the theta zero spiral -q^Z",
            point=complex(z),
            spiral="-q^Z",
        )


def qlog(z, q, tol: SeriesTolerance = DEFAULT_TOL, shifted: bool = False) -> complex:
    """q-logarithm ``l_q(z) = z Theta'(z) / Theta(z)``; ``l_q(qz) = l_q(z) + 1``.

    ``shifted=True`` selects the variant built on ``Theta(-z)``, i.e. the
    value ``l_q(-z)``.
    """
    q = QParameter.coerce(q)
    z = complex(z)
    if z == 0:
        raise DomainError("qlog is evaluated on C* only")
    zz = -z if shifted else z
    _guard(zz, q, "qlog")
    return _log_theta_full(zz, q, tol, True)[1]


def qchar(c, z, q, tol: SeriesTolerance = DEFAULT_TOL, shifted: bool = False) -> complex:
    """q-character ``e_{q,c}(z) = z**eps(c) Theta(z) / Theta(z / cbar)``.

    Satisfies ``e_{q,c}(qz) = c e_{q,c}(z)`` and ``e_{q,q**n}(z) = z**n``.
    With ``shifted=True`` both thetas are evaluated at ``-z``.
    """
    q = QParameter.coerce(q)
    z = complex(z)
    if z == 0:
        raise DomainError("qchar is evaluated on C* only")
    dec = annulus_decompose(c, q)
    zpow = z ** dec.epsilon
    if abs(dec.cbar - 1.0) == 0.0:
        return zpow
    sgn = -1.0 if shifted else 1.0
    num_pt = sgn * z
    den_pt = sgn * z / dec.cbar
    _guard(den_pt, q, "qchar pole")
    if theta_zero_distance(num_pt, q) == 0.0:
        return 0j
    return zpow * cmath.exp(log_theta(num_pt, q, tol) - log_theta(den_pt, q, tol))


def cocycle_phi(c, d, z, q, tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """The elliptic cocycle ``e_{q,c} e_{q,d} / e_{q,cd}`` at z."""
    q = QParameter.coerce(q)
    c, d = complex(c), complex(d)
    den = qchar(c * d, z, q, tol)
    if den == 0:
        raise PoleProximityError("cocycle denominator vanishes", point=complex(z))
    return qchar(c, z, q, tol) * qchar(d, z, q, tol) / den


def psi(a, c, q, tol: SeriesTolerance = DEFAULT_TOL) -> complex:
    """Twisting scalar ``g_a(c) / e_{q,c}(a)``; depends on c only through cbar."""
    q = QParameter.coerce(q)
    e = qchar(c, a, q, tol)
    if e == 0:
        raise PoleProximityError("e_{q,c}(a) vanishes", point=complex(a))
    return char_eval(g_char(a, q), c, q) / e
