import numpy as np
import pytest

from nehari_takagi._linalg import unit_circle
from nehari_takagi.errors import (
    BlockSingular,
    EvaluationAtPole,
    NotSchurOnCircle,
    PoleNotCancelled,
)
from nehari_takagi.nehari import random_problem
from nehari_takagi.resolvent import GammaGeneratingMatrix, assemble, signature
from nehari_takagi.schur import (
    BlaschkeProduct,
    BPFactor,
    blaschke_factor,
    bp_evaluate,
    kernel_negative_squares,
    kl_factorize,
    laurent_coefficients,
    pg_transform,
    pole_multiplicity,
    schur_kernel_gram,
)


def test_blaschke_factor():
    a = 0.3 + 0.4j
    assert blaschke_factor(a, a) == 0
    for mu in unit_circle(12):
        assert abs(blaschke_factor(a, mu)) == pytest.approx(1.0, abs=1e-14)
    assert abs(blaschke_factor(a, 0.1)) < 1


def test_bp_factor_is_inner():
    f = BPFactor.from_vector(0.5j, [1.0, 1.0j])
    assert f.rank == 1 and f.size == 2
    for mu in unit_circle(8):
        v = f.evaluate(mu)
        assert np.allclose(v.conj().T @ v, np.eye(2), atol=1e-13)
    lam = 0.2 - 0.1j
    assert np.allclose(f.evaluate(lam) @ f.evaluate_inverse(lam), np.eye(2), atol=1e-13)
    assert abs(np.linalg.det(f.evaluate(0.5j))) < 1e-15


def test_bp_factor_validation():
    with pytest.raises(ValueError):
        BPFactor(1.2, np.eye(1))
    with pytest.raises(ValueError):
        BPFactor(0.1, np.array([[1.0, 1.0], [0.0, 0.0]]))


def test_product_order():
    f1 = BPFactor.from_vector(0.3, [1.0, 0.0])
    f2 = BPFactor.from_vector(-0.2j, [1.0, 1.0])
    b = BlaschkeProduct.identity(2).prepend(f2).prepend(f1)
    lam = 0.4 + 0.1j
    assert np.allclose(bp_evaluate(b, lam), f1.evaluate(lam) @ f2.evaluate(lam))
    assert b.degree == 2 and b.zeros == [0.3, -0.2j]
    assert np.allclose(b.evaluate_inverse(lam) @ b.evaluate(lam), np.eye(2))


def test_scalar_product_degree():
    b = BlaschkeProduct.scalar([0.1, 0.1, -0.5j])
    assert b.degree == 3
    assert abs(b.evaluate(0.1)[0, 0]) < 1e-15


def test_laurent_closed_form():
    # 2/(z-a)^2 + 3/(z-a) + analytic
    a = 0.2 + 0.1j
    f = lambda z: np.array([[2 / (z - a) ** 2 + 3 / (z - a) + np.exp(z)]])  # noqa: E731
    coeffs = laurent_coefficients(f, a, 3, 0.1)
    assert len(coeffs) == 3
    assert abs(coeffs[0][0, 0]) < 1e-12
    assert coeffs[1][0, 0] == pytest.approx(2, abs=1e-12)
    assert coeffs[2][0, 0] == pytest.approx(3, abs=1e-12)


@pytest.mark.parametrize("f, lam0, expected", [
    (lambda z: np.array([[1 / (z - 0.3)]]), 0.3, 1),
    (lambda z: np.array([[1 / (z - 0.3) ** 2]]), 0.3, 2),
    (lambda z: np.diag([1 / (z - 0.3), 1 / (z - 0.3)]), 0.3, 2),
    (lambda z: np.array([[1 / (z - 0.3), 1 / (z - 0.3) ** 2]]), 0.3, 2),
    (lambda z: np.array([[np.cos(z)]]), 0.3, 0),
])
def test_pole_multiplicity(f, lam0, expected):
    assert pole_multiplicity(f, lam0) == expected


def test_pole_multiplicity_rank_deficient_principal_part():
    # rank-one principal part [[1, 1], [1, 1]] / (z - a): one pole, not two
    a = -0.4j
    f = lambda z: np.ones((2, 2)) / (z - a) + np.eye(2)  # noqa: E731
    assert pole_multiplicity(f, a) == 1


def _certificate_ok(kl, s, lam_list):
    for lam in lam_list:
        assert np.allclose(kl.b_left.evaluate(lam) @ s(lam), kl.s_left(lam), atol=1e-8)


def test_kl_scalar_single_pole():
    a = 0.5
    s = lambda z: np.array([[0.3 / blaschke_factor(a, z)]])  # noqa: E731
    kl = kl_factorize(s, [(a, 1)])
    assert kl.kappa == 1
    assert kl.coprimality_certificate > 1e-6
    assert kl.s_left_sup <= 1 + 1e-8
    assert kl.s_left(0.1)[0, 0] == pytest.approx(0.3, abs=1e-10)
    assert kl.s_left(a)[0, 0] == pytest.approx(0.3, abs=1e-8)


def test_kl_repeated_pole():
    a = -0.2 + 0.3j
    s = lambda z: np.array([[0.5 / blaschke_factor(a, z) ** 2]])  # noqa: E731
    kl = kl_factorize(s, [(a, 2)])
    assert kl.kappa == 2 and kl.b_left.zeros == [a, a]
    assert kl.coprimality_certificate > 1e-6
    assert kl.s_left_sup <= 1 + 1e-8
    _certificate_ok(kl, s, [0.0, 0.4, -0.7j])


def test_kl_matrix_diagonal():
    a = 0.4j
    s = lambda z: np.diag([0.5 / blaschke_factor(a, z), 0.2])  # noqa: E731
    kl = kl_factorize(s, [(a, 1)])
    proj = kl.b_left.factors[0].projector
    assert np.allclose(proj, np.diag([1, 0]), atol=1e-10)
    assert kl.s_left_sup <= 1 + 1e-8


def test_kl_three_poles_matrix(rng):
    # s = U diag(c1/(b_a b_b), c2/b_c) V, kappa = 3
    U = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))[0]
    V = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))[0]
    a, b, c = 0.3, -0.5 + 0.2j, 0.1j

    def s(z):
        d = np.diag([0.6 / (blaschke_factor(a, z) * blaschke_factor(b, z)),
                     0.4 / blaschke_factor(c, z)])
        return U @ d @ V
    kl = kl_factorize(s, [(a, 1), (b, 1), (c, 1)])
    assert kl.kappa == 3
    assert kl.coprimality_certificate > 1e-6
    assert kl.s_left_sup <= 1 + 1e-8
    _certificate_ok(kl, s, [0.7, -0.2 - 0.6j])


def test_kl_rejects_non_schur():
    with pytest.raises(NotSchurOnCircle):
        kl_factorize(lambda z: np.array([[2.0]]), [])


def test_kl_rejects_overstated_multiplicity():
    a = 0.5
    s = lambda z: np.array([[0.3 / blaschke_factor(a, z)]])  # noqa: E731
    with pytest.raises(PoleNotCancelled):
        kl_factorize(s, [(a, 2)])


def test_kl_rejects_understated_multiplicity():
    a = 0.5
    s = lambda z: np.array([[0.3 / blaschke_factor(a, z) ** 2]])  # noqa: E731
    with pytest.raises(PoleNotCancelled):
        kl_factorize(s, [(a, 1)])


def test_pg_transform_unitary(rng):
    r = random_problem(3, 2, 1, 1, rng)
    G = GammaGeneratingMatrix(assemble(r))
    for mu in unit_circle(16):
        S = pg_transform(G.evaluate(mu), 2, 1)
        assert np.allclose(S.conj().T @ S, np.eye(3), atol=1e-10)


def test_pg_transform_contractive_inside(rng):
    # a j-contractive constant matrix maps to a contraction
    p, q = 1, 1
    j = signature(p, q)
    t = 0.7
    W = np.array([[np.cosh(t), np.sinh(t)], [np.sinh(t), np.cosh(t)]]) @ np.diag([0.9, 1.0])
    assert np.all(np.linalg.eigvalsh(j - W @ j @ W.T) >= -1e-14)
    S = pg_transform(W, p, q)
    assert np.linalg.norm(S, 2) <= 1 + 1e-12


def test_pg_transform_errors():
    with pytest.raises(ValueError):
        pg_transform(np.eye(3), 1, 1)
    with pytest.raises(BlockSingular):
        pg_transform(np.array([[1.0, 1.0], [1.0, 0.0]]), 1, 1)


def test_kernel_schur_function_has_no_negative_squares():
    s = lambda z: np.array([[0.5 * z]])  # noqa: E731
    pts = 0.8 * unit_circle(10)
    assert kernel_negative_squares(s, pts) == 0
    H = schur_kernel_gram(s, pts)
    assert np.allclose(H, H.conj().T)


@pytest.mark.parametrize("zeros, expected", [([0.3], 1), ([0.3, -0.4j], 2), ([0.2, 0.2], 2)])
def test_kernel_counts_poles(zeros, expected):
    b = BlaschkeProduct.scalar(zeros)
    s = lambda z: 0.5 * b.evaluate_inverse(z)  # noqa: E731
    pts = [0.9 * np.exp(2j * np.pi * k / 7) for k in range(7)] + [0.0, 0.5j, -0.6]
    assert kernel_negative_squares(s, pts) == expected


def test_kernel_with_directions():
    a = 0.3
    s = lambda z: np.diag([0.5 / blaschke_factor(a, z), 0.5])  # noqa: E731
    pts = [0.0, 0.6, -0.6, 0.6j]
    dirs = [[1.0, 0.0]] * 4
    assert kernel_negative_squares(s, pts, dirs) == 1
    dirs = [[0.0, 1.0]] * 4
    assert kernel_negative_squares(s, pts, dirs) == 0


def test_kernel_at_pole():
    s = lambda z: np.array([[1 / (z - 0.3)]])  # noqa: E731
    with pytest.raises(EvaluationAtPole):
        schur_kernel_gram(s, [0.3, 0.0])
