import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nehari_takagi.errors import DimensionMismatch, NotMinimal, SingularEvaluation, Unstable
from nehari_takagi.realization import (
    Realization,
    evaluate,
    evaluate_many,
    kalman_matrices,
    markov,
    markov_sequence,
    random_realization,
    reflect,
    rho_omega,
    validate,
)


def test_validate_scalar(scalar):
    rep = validate(scalar)
    assert rep.controllable and rep.observable and rep.minimal
    assert rep.spectral_radius == pytest.approx(0.5)


def test_validate_nilpotent_not_minimal():
    r = Realization(np.zeros((2, 2)), [[1], [0]], [[1, 0]])
    rep = validate(r)
    assert rep.rank_Xi == 1
    assert not rep.minimal
    with pytest.raises(NotMinimal):
        r.require_minimal()


def test_validate_random_full_rank(rng):
    r = random_realization(4, 2, 3, rng)
    xi, om = kalman_matrices(r)
    rep = validate(r)
    assert (rep.rank_Xi, rep.rank_Omega) == (4, 4)
    assert np.linalg.matrix_rank(xi) == 4 and np.linalg.matrix_rank(om) == 4


def test_validate_is_deterministic(rng):
    r = random_realization(3, 1, 2, rng)
    assert validate(r) == validate(r)


@pytest.mark.parametrize("z, expected", [(0, -2.0), (1, 2.0), (-1, 1 / (-1.5))])
def test_evaluate_scalar(scalar, z, expected):
    assert evaluate(scalar, z)[0, 0] == pytest.approx(expected, abs=1e-14)


def test_evaluate_at_pole(scalar):
    with pytest.raises(SingularEvaluation):
        evaluate(scalar, 0.5)


def test_evaluate_many_matches_pointwise(rng):
    r = random_realization(3, 2, 2, rng)
    zs = np.exp(1j * rng.uniform(0, 2 * np.pi, 7))
    stacked = evaluate_many(r, zs)
    for z, v in zip(zs, stacked):
        assert np.allclose(v, evaluate(r, z), atol=1e-13)


@pytest.mark.parametrize("k, expected", [(1, 1.0), (3, 0.25)])
def test_markov_scalar(scalar, k, expected):
    assert markov(scalar, k)[0, 0] == pytest.approx(expected)


def test_markov_zero_state_matrix():
    r = Realization(np.zeros((2, 2)), [[1, 2], [3, 4]], [[1, 1]])
    assert np.all(markov(r, 2) == 0)


def test_kalman_matrices_examples(scalar):
    xi, om = kalman_matrices(scalar)
    assert xi.shape == (1, 1) and om.shape == (1, 1)
    assert xi[0, 0] == 1 and om[0, 0] == 1
    r = Realization(np.diag([0.5, 0.3]), [[1], [1]], [[1, 1]])
    xi, _ = kalman_matrices(r)
    assert np.allclose(xi, [[1, 0.5], [1, 0.3]])


def test_hankel_section_factorizes(rng):
    # (C A^{j+k-2} B)_{j,k<=N} = [C; ...; C A^{N-1}] [B, ..., A^{N-1} B]
    r = random_realization(3, 2, 1, rng)
    N = 8
    gam = markov_sequence(r, 2 * N - 1)
    H = np.block([[gam[j + k] for k in range(N)] for j in range(N)])
    obs = np.vstack([r.C @ np.linalg.matrix_power(r.A, j) for j in range(N)])
    ctr = np.hstack([np.linalg.matrix_power(r.A, k) @ r.B for k in range(N)])
    assert np.allclose(H, obs @ ctr, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), theta=st.floats(0, 2 * np.pi))
def test_circle_value_is_markov_series(seed, theta):
    rng = np.random.default_rng(seed)
    r = random_realization(int(rng.integers(1, 5)), 2, 2, rng)
    z = np.exp(1j * theta)
    K = 200
    gam = markov_sequence(r, K)
    series = np.tensordot(z ** -np.arange(1.0, K + 1), gam, axes=(0, 0))
    w, V = np.linalg.eig(r.A)
    # ||A^k|| <= cond(V) rho^k, so the tail is below c rho^K / (1 - rho)
    c = np.linalg.cond(V) * np.linalg.norm(r.B, 2) * np.linalg.norm(r.C, 2)
    bound = c * r.spectral_radius ** K / (1 - r.spectral_radius) + 1e-12
    assert np.linalg.norm(evaluate(r, z) - series) <= bound


def test_markov_decay(rng):
    r = random_realization(4, 1, 1, rng)
    w, V = np.linalg.eig(r.A)
    c = np.linalg.cond(V) * np.linalg.norm(r.B) * np.linalg.norm(r.C)
    for k in range(1, 60):
        assert np.linalg.norm(markov(r, k)) <= c * r.spectral_radius ** (k - 1) * (1 + 1e-9)


def test_rejects_unstable():
    with pytest.raises(Unstable):
        Realization([[1.0]], [[1.0]], [[1.0]])
    with pytest.raises(Unstable):
        Realization([[1 - 1e-13]], [[1.0]], [[1.0]])


@pytest.mark.parametrize("A, B, C", [
    ([[0.1, 0.0]], [[1.0]], [[1.0]]),
    ([[0.1]], [[1.0], [2.0]], [[1.0]]),
    ([[0.1]], [[1.0]], [[1.0, 2.0]]),
    ([[np.nan]], [[1.0]], [[1.0]]),
])
def test_rejects_bad_shapes(A, B, C):
    with pytest.raises(DimensionMismatch):
        Realization(A, B, C)


def test_matrices_are_read_only(scalar):
    with pytest.raises(ValueError):
        scalar.A[0, 0] = 0.1


def test_random_generator_radius(rng):
    r = random_realization(5, 2, 2, rng)
    assert r.spectral_radius == pytest.approx(0.8)


def test_disk_geometry():
    assert rho_omega(0.3, 0.3) > 0
    assert rho_omega(1.0, 1.0) == 0
    assert rho_omega(1.5, 1.5).real < 0
    lam = 0.4 - 0.7j
    assert abs(reflect(lam)) * abs(lam) == pytest.approx(1.0)
