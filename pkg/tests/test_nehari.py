import numpy as np
import pytest

from nehari_takagi._linalg import unit_circle
from nehari_takagi.errors import (
    DenominatorSingularEverywhere,
    DimensionMismatch,
    NotMinimal,
    NotSolvable,
)
from nehari_takagi.hankel import fourier_coefficients, hankel_rank
from nehari_takagi.nehari import (
    SchurParameter,
    check,
    hankel_inertia,
    random_problem,
    sample_solution,
    solve,
    verify_solution,
)
from nehari_takagi.realization import Realization, evaluate, markov_sequence
from nehari_takagi.stein import gramians, hankel_spectrum, negativity_index


@pytest.mark.parametrize("kappa, solvable", [(0, False), (1, True), (3, True)])
def test_check_scalar(scalar, kappa, solvable):
    rep = check(scalar, kappa)
    assert rep.kappa1 == 1 and rep.solvable is solvable
    assert rep.hankel_spectrum == pytest.approx((4 / 3,))
    assert rep.diagnostics["rank_Xi"] == 1


def test_check_half(scalar_half):
    rep = check(scalar_half, 0)
    assert rep.kappa1 == 0 and rep.solvable


def test_check_validation():
    with pytest.raises(ValueError):
        check(Realization([[0.5]], [[1.0]], [[1.0]]), -1)
    with pytest.raises(NotMinimal):
        check(Realization(np.zeros((2, 2)), [[1], [0]], [[1, 0]]), 2)


def test_solve_budget(scalar):
    with pytest.raises(NotSolvable):
        solve(scalar, 0)
    assert solve(scalar, 1).kappa1 == 1


def test_central_solution_scalar(scalar):
    h = sample_solution(solve(scalar, 1), SchurParameter.zero(1, 1))
    assert h.evaluate(-1)[0, 0] == pytest.approx(-0.96, abs=1e-13)
    assert h.evaluate(1)[0, 0] == 0


def test_scalar_solutions_certify(scalar):
    # each solution differs from f0 by a function with exactly one pole in the disk
    G = solve(scalar, 1)
    for c in (0.0, 0.5, -0.9j, 1.0):
        h = sample_solution(G, SchurParameter(np.array([[c]])))
        rep = verify_solution(h, scalar, 1)
        assert rep.passed, rep
        assert rep.hankel_rank == 1


def test_schur_parameter_validation():
    with pytest.raises(ValueError):
        SchurParameter(np.array([[1.5]]))
    with pytest.raises(ValueError):
        SchurParameter(np.array([[1.0]]), zeros=(0.2,))
    with pytest.raises(ValueError):
        SchurParameter(np.array([[0.5]]), zeros=(1.2,))
    eps = SchurParameter(np.array([[0.5]]), zeros=(0.2, -0.3j))
    assert eps.kind == "blaschke_scaled" and eps.pole_count == 2
    assert SchurParameter.zero(2, 1).kind == "constant"


def test_sample_checks_shape_and_budget(scalar):
    G = solve(scalar, 1)
    with pytest.raises(DimensionMismatch):
        sample_solution(G, SchurParameter.zero(2, 1))
    with pytest.raises(ValueError):
        sample_solution(G, SchurParameter(np.array([[0.5]]), zeros=(0.1,)), kappa=1)
    sample_solution(G, SchurParameter(np.array([[0.5]]), zeros=(0.1,)), kappa=2)


def test_denominator_singular_everywhere(scalar):
    G = solve(scalar, 1)

    def eps(mu):
        a = G.evaluate(mu)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.array([[-a[1, 1] / a[1, 0]]])
    with pytest.raises(DenominatorSingularEverywhere):
        sample_solution(G, eps)


def test_callable_parameter_matches_constant(rng):
    r = random_problem(2, 2, 1, 1, rng)
    G = solve(r, 1)
    c = np.array([[0.3], [0.2j]])
    a = sample_solution(G, SchurParameter(c))
    b = sample_solution(G, lambda mu: c)
    for mu in (0.1, np.exp(0.5j)):
        assert np.allclose(a.evaluate(mu), b.evaluate(mu), atol=1e-13)


def test_evaluate_many_matches(rng):
    r = random_problem(3, 1, 2, 2, rng)
    h = sample_solution(solve(r, 3), SchurParameter(0.4 * np.ones((1, 2)) / np.sqrt(2), zeros=(0.5,)))
    mus = unit_circle(10)
    for mu, v in zip(mus, h.evaluate_many(mus)):
        assert np.allclose(v, h.evaluate(mu), atol=1e-12)


def test_blaschke_scaled_parameter_adds_poles(rng):
    # kappa - kappa1 extra poles are allowed and used
    r = random_problem(3, 1, 1, 1, rng)
    G = solve(r, 3)
    eps = SchurParameter(np.array([[0.6]]), zeros=(0.4, -0.3 + 0.3j))
    h = sample_solution(G, eps, kappa=3)
    rep = verify_solution(h, r, 3)
    assert rep.passed
    assert rep.hankel_rank == 3
    assert verify_solution(h, r, 2).passed is False


@pytest.mark.parametrize("k1", [0, 1, 2])
def test_end_to_end_random(rng, k1):
    for _ in range(5):
        r = random_problem(3, 2, 2, k1, rng)
        c = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        c *= 0.9 * rng.uniform() / np.linalg.norm(c, 2)
        h = sample_solution(solve(r, k1), SchurParameter(c))
        rep = verify_solution(h, r, k1)
        assert rep.passed, rep
        assert rep.hankel_rank == k1
        assert rep.sup_norm <= 1 + 1e-7


def test_difference_has_kappa1_poles_independently(scalar):
    # oracle: coefficients of f - f0 computed from scratch, not through verify
    h = sample_solution(solve(scalar, 1), SchurParameter(np.array([[0.25]])))
    fs = fourier_coefficients(h.evaluate, N=2048, K=40)
    diff = fs.coeffs - markov_sequence(scalar, 40)
    assert hankel_rank(diff, 1e-8, scale=1.0) == 1


def test_verify_rejects_f0_itself(scalar):
    # f0 is exactly the data: rank 0 but sup = 2 > 1
    class F0:
        p = q = 1

        def evaluate(self, mu):
            return evaluate(scalar, mu)

        def circle_values(self, n):
            return np.stack([self.evaluate(m) for m in unit_circle(n)]), []
    rep = verify_solution(F0(), scalar, 5)
    assert rep.hankel_rank == 0 and rep.sup_norm == pytest.approx(2.0)
    assert not rep.passed


def test_hankel_inertia_scalar(scalar, scalar_half):
    assert hankel_inertia(scalar) == 1
    assert hankel_inertia(scalar_half) == 0


def test_random_problem_index(rng):
    for k1 in range(5):
        r = random_problem(4, 2, 1, k1, rng)
        assert negativity_index(gramians(r)) == k1
        sv = hankel_spectrum(gramians(r))
        assert np.sum(sv > 1) == k1
    with pytest.raises(ValueError):
        random_problem(2, 1, 1, 3, rng)
