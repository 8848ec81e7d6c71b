import numpy as np
import pytest

from qconnect import (
    CharacterSpec,
    ContractError,
    FlatObject,
    GaloisElement,
    QParameter,
    act,
    annulus_decompose,
    char_eval,
    eigen_line_condition,
    gamma1,
    gamma2,
    groupoid_connector,
    hom_space,
    jordan_tensor_decompose,
    kron,
    naturality_check,
    tensor_compat_check,
    unipotent_pow,
)
from qconnect.flatcat import hom_window


def _random_q_killing(rng, q):
    """Random character with gamma(q) = 1: integer beta, any alpha."""
    return CharacterSpec(int(rng.integers(-3, 4)), complex(rng.integers(-3, 4)))


def _random_flat(rng, q, n=2):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return FlatObject.of(A + 2 * np.eye(n), q)


def test_flat_object_cache(q4):
    X = FlatObject.of(np.array([[2.0, 1.0], [0.0, 2.0]]), q4)
    assert np.allclose(X.s @ X.u, X.A)
    assert all(1 <= abs(d.cbar) < 4 for d in X.annulus_spectrum)


def test_hom_examples(q4):
    c = 1.7 + 0.4j
    C = FlatObject.of([[c]], q4)
    basis = hom_space(C, C)
    assert len(basis) == 1 and list(basis[0].terms) == [0]
    one = FlatObject.of([[1.0]], q4)
    Q = FlatObject.of([[q4.q]], q4)
    basis = hom_space(one, Q)
    assert len(basis) == 1 and list(basis[0].terms) == [1]
    assert abs(basis[0](0.3)[0, 0] / basis[0](1.0)[0, 0] - 0.3) < 1e-14
    # no degree k meets c q^Z
    assert hom_space(one, FlatObject.of([[2.5]], q4)) == []
    assert list(hom_window(one, FlatObject.of([[2.5]], q4))) == []


def test_hom_window_contract(q4):
    one = FlatObject.of([[1.0]], q4)
    Q2 = FlatObject.of([[q4.q ** 2]], q4)
    with pytest.raises(ContractError):
        hom_space(one, Q2, degree_window=range(0, 2))
    assert len(hom_space(one, Q2, degree_window=range(-3, 4))) == 1


def test_hom_basis_intertwines(rng, q4):
    A = FlatObject.of(np.diag([1.0, 4.0, 2.5]), q4)
    B = FlatObject.of(np.array([[4.0, 1.0, 0], [0, 4.0, 0], [0, 0, 16.0]]), q4)
    basis = hom_space(A, B)
    assert basis
    for F in basis:
        for z in rng.normal(size=3) + 1j * rng.normal(size=3):
            assert F.residual(z) < 1e-9


def test_act_examples(q4):
    X = FlatObject.of(np.diag([2.0, -1.0]), q4)
    assert np.allclose(act(GaloisElement(), X), np.eye(2))
    assert np.allclose(act(GaloisElement(gamma1(), 0), X), np.diag([1, -1]), atol=1e-14)
    U = np.array([[1.0, 3.0], [0.0, 1.0]])
    Xu = FlatObject.of(U, q4)
    assert np.allclose(act(GaloisElement(gamma2(0.3), 0.7), Xu), unipotent_pow(U, 0.7))


def test_action_composition(rng, q4):
    for _ in range(10):
        X = FlatObject.of(np.array([[2.0, 1.0, 0], [0, 2.0, 0], [0, 0, -0.5j]]), q4)
        g1 = GaloisElement(_random_q_killing(rng, q4), complex(rng.normal()))
        g2 = GaloisElement(_random_q_killing(rng, q4), complex(rng.normal()))
        lhs = act(g1, X) @ act(g2, X)
        assert np.linalg.norm(lhs - act(g1 * g2, X)) < 1e-10 * np.linalg.norm(lhs)


def test_tensor_compat(rng, q4):
    X = FlatObject.of(np.diag([2.0, 3.0]), q4)
    Y = FlatObject.of(np.diag([1.5j, -2.0]), q4)
    assert tensor_compat_check(GaloisElement(gamma1(), 0), X, Y) < 1e-10
    J = FlatObject.of([[1.0, 1.0], [0.0, 1.0]], q4)
    assert tensor_compat_check(GaloisElement(CharacterSpec(), 0.37), J, J) < 1e-10
    g = GaloisElement(gamma2(), 0.7)
    for _ in range(5):
        assert tensor_compat_check(g, _random_flat(rng, q4), _random_flat(rng, q4)) < 1e-9


def test_naturality_examples(rng, q4):
    one = FlatObject.of([[1.0]], q4)
    Q = FlatObject.of([[q4.q]], q4)
    F = hom_space(one, Q)[0]
    z0 = 0.8 + 0.3j
    z1 = 1.9 - 0.6j
    # arrow from z0 to z1
    arrow = GaloisElement(groupoid_connector(z0, z1, q4), 0)
    assert naturality_check(arrow, F, z0) < 1e-10
    # a group element paired with z1 != z0 fails by |z1 - z0| times the action
    g = GaloisElement(gamma1(), 0)
    r = naturality_check(g, F, z0, z1=z1)
    assert abs(r - abs(z1 - z0) * abs(F(1.0)[0, 0])) < 1e-12
    C = FlatObject.of(np.diag([2.0, 3.0]), q4)
    for Fc in hom_space(C, C):
        assert naturality_check(GaloisElement(gamma2(2), 0.4), Fc, z0) < 1e-10


def test_naturality_full_bases(rng, q4):
    pairs = [
        (np.diag([1.0, 2.0]), np.diag([4.0, 8.0])),
        (np.array([[2.0, 1.0], [0, 2.0]]), np.array([[8.0, 1.0], [0, 8.0]])),
        (np.diag([1.0]), np.diag([4.0])),
    ]
    for A, B in pairs:
        X, Y = FlatObject.of(A, q4), FlatObject.of(B, q4)
        basis = hom_space(X, Y)
        assert basis
        for F in basis:
            for _ in range(5):
                g = GaloisElement(_random_q_killing(rng, q4), complex(rng.normal()))
                assert g.is_group_element(q4)
                assert naturality_check(g, F, rng.normal() + 1j * rng.normal()) < 1e-9


@pytest.mark.parametrize("n, p", [(n, p) for n in range(1, 7) for p in range(1, 7)])
def test_plethysm(n, p):
    got = jordan_tensor_decompose(n, p)
    assert got == list(range(n + p - 1, abs(n - p), -2))
    assert sum(got) == n * p


def test_plethysm_dense_oracle():
    # Jordan type from numerical ranks of the floating-point matrix
    for n, p in ((2, 3), (3, 3), (4, 2)):
        Jn = np.eye(n) + np.eye(n, k=1)
        Jp = np.eye(p) + np.eye(p, k=1)
        N = kron(Jn, Jp) - np.eye(n * p)
        ranks = [np.linalg.matrix_rank(np.linalg.matrix_power(N, k)) for k in range(n * p + 1)]
        ge = [ranks[k - 1] - ranks[k] for k in range(1, n * p + 1)] + [0]
        sizes = sorted([k for k in range(1, n * p + 1) for _ in range(ge[k - 1] - ge[k])], reverse=True)
        assert sizes == jordan_tensor_decompose(n, p)


def test_eigen_line_examples(q4):
    gs = [gamma1(), gamma2()]
    assert eigen_line_condition([2.0, 3.0], [1, 0], gs, q4)
    assert eigen_line_condition([2.0, 2.0], [1, 1], gs, q4)
    assert not eigen_line_condition([2.0, 3.0], [1, 1], gs, q4)
    # eigenvalues in the same q-spiral share the annulus representative
    assert eigen_line_condition([2.0, 8.0], [1, 1], gs, q4)


def test_density_proxy(rng, q4):
    sample = [2.0, 8.0, 3.0, -2.0, 2.0 * np.exp(0.4j)]
    gs = [gamma1(), gamma2()]
    checked = 0
    for i in range(len(sample)):
        for j in range(len(sample)):
            for k in range(len(sample)):
                eig = [sample[i], sample[j], sample[k]]
                for x in ([1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]):
                    if not eigen_line_condition(eig, x, gs, q4):
                        continue
                    checked += 1
                    X = FlatObject.of(np.diag(eig), q4)
                    v = np.array(x, dtype=complex)
                    for _ in range(50):
                        g = GaloisElement(_random_q_killing(rng, q4), 0)
                        w = act(g, X) @ v
                        # w is a multiple of v
                        assert np.linalg.matrix_rank(np.column_stack([v, w]), tol=1e-10) == 1
    assert checked > 20


def test_group_element(q4):
    assert GaloisElement(gamma2(3), 0).is_group_element(q4)
    assert not GaloisElement(gamma2(0.5), 0).is_group_element(q4)
    assert abs(char_eval(CharacterSpec(2, 5), q4.q, q4) - 1) < 1e-12
    assert annulus_decompose(8.0, q4).epsilon == 1
