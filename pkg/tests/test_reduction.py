import mpmath
import numpy as np
import pytest

from qconnect import (
    ContractError,
    NumericFailure,
    PoleProximityError,
    QParameter,
    RationalMatrix,
    RationalMatrixSystem,
    eval_gauge,
    product_solution_regular,
    reduce_at_infty,
    reduce_at_zero,
)

from conftest import Z, safe_points, unipotent_system


def _scalar(c=1.0, q=4):
    return RationalMatrixSystem(RationalMatrix([[c * (1 - Z / 2)]]), QParameter.from_q(q))


def _pochhammer_coeffs(q, x_scale, K, factors=400):
    """Taylor coefficients of prod_{i>=1} (1 - q^-i z * x_scale) by polynomial products."""
    c = np.zeros(K + 1, complex)
    c[0] = 1
    for i in range(1, factors + 1):
        a = x_scale * q ** (-i)
        c[1:] = c[1:] - a * c[:-1]
    return c


def _gauge_residual(s, A, z):
    lhs = eval_gauge(s, A.q.q * z) @ s.A0.A
    rhs = A(z) @ eval_gauge(s, z)
    return np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(rhs))


def test_constant_system():
    q = QParameter.from_q(3)
    A = RationalMatrixSystem(RationalMatrix.constant(np.array([[2.0, 1.0], [0.0, 1.5]])), q)
    s = reduce_at_zero(A, 40)
    assert np.allclose(s.coeffs[0], np.eye(2))
    assert np.abs(s.coeffs[1:]).max() == 0
    assert s.recurrence_residuals().max() < 1e-10


def test_nilpotent_example():
    q = QParameter.from_q(2 + 1j)
    A = RationalMatrixSystem(RationalMatrix([[1, Z], [0, 1]]), q)
    s = reduce_at_zero(A, 10)
    assert np.allclose(s.coeffs[1], [[0, 1 / (q.q - 1)], [0, 0]], atol=1e-15)
    assert np.abs(s.coeffs[2:]).max() < 1e-15


def test_scalar_against_pochhammer():
    q = 4.0
    s = reduce_at_zero(_scalar(1.7 - 0.2j, q), 30)
    want = _pochhammer_coeffs(q, 0.5, 30)
    assert np.allclose(s.coeffs[:, 0, 0], want, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("which", ["constant", "unipotent", "scalar"])
def test_recurrence_residuals(which):
    if which == "constant":
        A = RationalMatrixSystem(RationalMatrix.constant(np.diag([1.3, 2.0j])), QParameter.from_q(4))
    elif which == "unipotent":
        A = unipotent_system(4)[0]
    else:
        A = _scalar()
    s = reduce_at_zero(A, 40)
    assert np.allclose(s.coeffs[0], np.eye(A.n))
    assert s.recurrence_residuals().max() < 1e-10


def test_recurrence_at_infinity():
    A = unipotent_system(4)[0]
    s = reduce_at_infty(A, 40)
    assert s.recurrence_residuals().max() < 1e-10
    t = RationalMatrixSystem(RationalMatrix([[2 * (1 - Z / 2) / (1 - Z / 3)]]), QParameter.from_q(3 + 1j))
    assert reduce_at_infty(t, 40).recurrence_residuals().max() < 1e-10


def test_truncation_contract():
    with pytest.raises(ContractError):
        reduce_at_zero(_scalar(), 201)
    with pytest.raises(ContractError):
        reduce_at_infty(_scalar(), 10)  # pole of A at infinity


def test_gauge_equation_with_continuation(rng):
    A = unipotent_system(4)[0]
    s = reduce_at_zero(A, 40)
    pts = list(safe_points(18, rng, 0.05, 3.0))
    # two points that need two continuation steps
    pts += [0.2 * 16 * np.exp(0.3j), 0.15 * 16 * np.exp(2.0j)]
    steps = [eval_gauge(s, z, return_steps=True)[1] for z in pts]
    assert max(steps) >= 2
    for z in pts:
        assert _gauge_residual(s, A, z) < 1e-9


def test_gauge_equation_at_infinity(rng):
    A = unipotent_system(4)[0]
    s = reduce_at_infty(A, 40)
    # the gauge at infinity obeys the same equation with A(inf) in place of A(0)
    for z in safe_points(20, rng, 0.2, 20.0):
        assert _gauge_residual(s, A, z) < 1e-9


def test_continuation_matches_long_series():
    A = unipotent_system(4)[0]
    s40 = reduce_at_zero(A, 40)
    s120 = reduce_at_zero(A, 120)
    z_in = 0.2 * np.exp(0.7j)
    z = 16 * z_in
    G, j = eval_gauge(s40, z, return_steps=True)
    assert j == 2
    direct = s120.sum_series(z)
    assert np.linalg.norm(G - direct) < 1e-8


def test_guard():
    A = unipotent_system(4)[0]
    s = reduce_at_zero(A, 40)
    with pytest.raises(PoleProximityError):
        eval_gauge(s, 4j)
    with pytest.raises(PoleProximityError):
        eval_gauge(s, 1j * (1 + 1e-9))


def test_too_many_steps():
    A = unipotent_system(1.001)[0]
    s = reduce_at_zero(A, 5)
    with pytest.raises(NumericFailure):
        eval_gauge(s, 1e6 * np.exp(0.3j))


def test_product_identity():
    A = RationalMatrixSystem(RationalMatrix.identity(2), QParameter.from_q(2))
    assert np.allclose(product_solution_regular(A, 0.3 + 1j), np.eye(2))


def test_product_scalar_against_mpmath():
    q = 4.0
    A = _scalar(1.0, q)
    for z in (0.3 + 0.5j, 2.0 - 1.0j, -5.0):
        X = product_solution_regular(A, z)[0, 0]
        want = complex(mpmath.qp(z / (2 * q), 1 / q))
        assert abs(X - want) < 1e-12 * abs(want)


def test_product_unipotent_telescopes(rng):
    A, a = unipotent_system(4)
    for z in safe_points(5, rng):
        X = product_solution_regular(A, z)
        want = sum(a(z / 4.0 ** n) for n in range(1, 200))
        assert abs(X[0, 1] - want) < 1e-12
        assert np.allclose(np.diag(X), 1) and abs(X[1, 0]) == 0


def test_product_solves_system(rng):
    A, _ = unipotent_system(4)
    for z in safe_points(5, rng):
        lhs = product_solution_regular(A, 4 * z)
        rhs = A(z) @ product_solution_regular(A, z)
        assert np.linalg.norm(lhs - rhs) < 1e-8


def test_product_agrees_with_series(rng):
    for A in (unipotent_system(4)[0], _scalar(1.0, 4)):
        s = reduce_at_zero(A, 40)
        for z in safe_points(10, rng, 0.1, 3.0):
            assert np.linalg.norm(product_solution_regular(A, z) - eval_gauge(s, z)) < 1e-8


def test_product_contract():
    with pytest.raises(ContractError):
        product_solution_regular(_scalar(2.0), 0.5)


def test_poles_lie_outward():
    # scan rings through the spirals i q^k: the gauge at 0 blows up only for k >= 1
    A = unipotent_system(4)[0]
    s = reduce_at_zero(A, 40)
    delta = 1e-7
    outward = [np.linalg.norm(eval_gauge(s, 1j * 4.0 ** k * (1 + delta), guard=False)) for k in (1, 2)]
    inward = [np.linalg.norm(eval_gauge(s, 1j * 4.0 ** k * (1 + delta), guard=False)) for k in (-2, -1, 0)]
    assert min(outward) > 1e5
    assert max(inward) < 10
    theta = np.linspace(0, 2 * np.pi, 721)
    ring = [np.linalg.norm(eval_gauge(s, 4 * np.exp(1j * t), guard=False)) for t in theta]
    peak = theta[int(np.argmax(ring))]
    assert min(abs(peak - np.pi / 2), abs(peak - 3 * np.pi / 2)) < 0.02
