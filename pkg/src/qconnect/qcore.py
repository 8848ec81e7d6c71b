"""The deformation parameter and the multiplicative structure of C*.

Everything here is built on the splitting ``z = u * q**y`` with ``|u| = 1`` and
``y`` real, where real powers are defined through ``tau``:
``q**y = exp(-2i*pi*tau*y)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import DomainError

__all__ = [
    "QParameter",
    "AnnulusDecomposition",
    "CStarSplit",
    "CharacterSpec",
    "annulus_decompose",
    "split",
    "log_q",
    "char_eval",
    "groupoid_connector",
    "gamma1",
    "gamma2",
    "delta",
    "g_char",
    "dist_to_q_lattice",
]

TWO_PI_I = 2j * math.pi

# |ln|c|/ln|q| - k| below this snaps to k, so that exact powers q**k land on
# the annulus boundary deterministically.
_EPS_SNAP = 1e-12


@dataclass(frozen=True)
class QParameter:
    """``q = exp(-2i*pi*tau)`` with ``Im(tau) > 0``, hence ``|q| > 1``.

    Build with :meth:`from_tau` or :meth:`from_q`; when both are known the
    tau value is authoritative and q is recomputed from it.
    """

    tau: complex
    q: complex = field(init=False)

    def __post_init__(self):
        tau = complex(self.tau)
        if not tau.imag > 0:
            raise DomainError(f"tau must lie in the upper half plane, got {tau}")
        q = cmath.exp(-TWO_PI_I * tau)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_tau(cls, tau) -> "QParameter":
        return cls(complex(tau))

    @classmethod
    def from_q(cls, q) -> "QParameter":
        q = complex(q)
        if not abs(q) > 1:
            raise DomainError(f"|q| must exceed 1, got |q| = {abs(q)}")
        tau = 1j * cmath.log(q) / (2 * math.pi)
        return cls(tau)

    @classmethod
    def coerce(cls, value) -> "QParameter":
        if isinstance(value, QParameter):
            return value
        return cls.from_q(value)

    @property
    def log_abs(self) -> float:
        """``ln|q|``."""
        return 2 * math.pi * self.tau.imag

    @property
    def log(self) -> complex:
        """The logarithm of q selected by tau."""
        return -TWO_PI_I * self.tau

    def power(self, y) -> complex:
        """``q**y`` for real or complex ``y`` along the tau branch."""
        return cmath.exp(-TWO_PI_I * self.tau * y)

    def int_power(self, k: int) -> complex:
        return self.q ** int(k)


@dataclass(frozen=True)
class AnnulusDecomposition:
    c: complex
    epsilon: int
    cbar: complex


@dataclass(frozen=True)
class CStarSplit:
    z: complex
    u: complex
    y: float


@dataclass(frozen=True)
class CharacterSpec:
    """The character ``u*q**y -> u**alpha * exp(2i*pi*beta*y)`` of C*."""

    alpha: int = 0
    beta: complex = 0j

    def __mul__(self, other: "CharacterSpec") -> "CharacterSpec":
        return CharacterSpec(self.alpha + other.alpha, self.beta + other.beta)

    def inverse(self) -> "CharacterSpec":
        return CharacterSpec(-self.alpha, -self.beta)

    def __truediv__(self, other: "CharacterSpec") -> "CharacterSpec":
        return self * other.inverse()

    def __call__(self, z, q) -> complex:
        return char_eval(self, z, q)


def _nonzero(z, name="z") -> complex:
    z = complex(z)
    if z == 0:
        raise DomainError(f"{name} must be nonzero")
    return z


def _epsilon(c: complex, q: QParameter) -> int:
    ratio = math.log(abs(c)) / q.log_abs
    k = round(ratio)
    if abs(ratio - k) < _EPS_SNAP:
        return int(k)
    return math.floor(ratio)


def annulus_decompose(c, q) -> AnnulusDecomposition:
    """Write ``c = q**epsilon * cbar`` with ``1 <= |cbar| < |q|``."""
    q = QParameter.coerce(q)
    c = _nonzero(c, "c")
    eps = _epsilon(c, q)
    return AnnulusDecomposition(c, eps, c / q.int_power(eps))


def split(z, q) -> CStarSplit:
    """Split ``z = u * q**y`` with ``|u| = 1``."""
    q = QParameter.coerce(q)
    z = _nonzero(z)
    y = math.log(abs(z)) / q.log_abs
    u = z / q.power(y)
    return CStarSplit(z, u / abs(u), y)


def log_q(z, q) -> complex:
    """Logarithm to base q, cut along the spiral ``q**R``.

    With ``u = exp(2i*pi*x)``, ``0 <= x < 1``, the value is ``y - x/tau`` so
    that ``q**log_q(z) == z`` and ``log_q(q**y) == y``.
    """
    q = QParameter.coerce(q)
    s = split(z, q)
    x = (cmath.phase(s.u) / (2 * math.pi)) % 1.0
    if x >= 1.0:  # -0.0 % 1.0 edge
        x = 0.0
    return s.y - x / q.tau


def char_eval(spec: CharacterSpec, z, q) -> complex:
    q = QParameter.coerce(q)
    s = split(z, q)
    return s.u ** spec.alpha * cmath.exp(TWO_PI_I * spec.beta * s.y)


def gamma1() -> CharacterSpec:
    return CharacterSpec(1, 0j)


def gamma2(b=1) -> CharacterSpec:
    return CharacterSpec(0, complex(b))


def delta(alpha, q) -> CharacterSpec:
    """``u*q**y -> q**(alpha*y)``."""
    q = QParameter.coerce(q)
    return CharacterSpec(0, -q.tau * complex(alpha))


def g_char(a, q) -> CharacterSpec:
    """The twisting character ``g_a = delta(log_q(a))``; it sends q to a."""
    return delta(log_q(a, q), q)


def groupoid_connector(b, c, q) -> CharacterSpec:
    """A character sending q to ``c/b``, i.e. an arrow from base point b to c."""
    b = _nonzero(b, "b")
    c = _nonzero(c, "c")
    return g_char(c / b, q)


def dist_to_q_lattice(z, q) -> float:
    """Relative distance from z to the nearest point of ``q**Z``."""
    q = QParameter.coerce(q)
    d = annulus_decompose(z, q)
    return min(abs(d.cbar - 1.0), abs(d.cbar - q.q) / abs(q.q))
