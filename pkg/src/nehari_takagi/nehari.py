"""Solvability test, resolvent construction and solution sampling for the
rational Nehari-Takagi problem.

Given ``f0 = C (zI - A)^{-1} B`` and a budget ``kappa``, the solutions are the
functions ``f`` with ``||f||_inf <= 1`` whose Hankel operator differs from
that of ``f0`` by rank at most ``kappa``. They exist iff
``kappa1 = nu_-(I - PQ) <= kappa`` and are the linear fractional images
``T[eps] = (a11 eps + a12)(a21 eps + a22)^{-1}`` of Schur parameters ``eps``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._linalg import checked_solve, unit_circle
from .errors import (
    CrossCheckFailure,
    DenominatorSingularEverywhere,
    DimensionMismatch,
    NehariError,
    NotSolvable,
    SingularEvaluation,
)
from .hankel import FourierSeries, HankelMatrix, fourier_coefficients, hankel_rank
from .realization import RANK_TOL, Realization, markov_sequence, random_realization
from .resolvent import GammaGeneratingMatrix, assemble
from .schur import BlaschkeProduct
from .stein import default_tol_inertia, gramians, hankel_spectrum, negativity_index, pick_matrix

__all__ = [
    "FourierSeries", "HankelMatrix", "SchurParameter", "SolutionHandle", "SolverReport",
    "VerifyReport", "check", "fourier_coefficients", "hankel_inertia", "hankel_rank",
    "random_problem", "sample_solution", "solve", "verify_solution",
]

HANKEL_REL_TOL = 1e-6
VERIFY_COEFFS = 48
VERIFY_SUP_POINTS = 256
VERIFY_FFT_POINTS = 4096
SUP_TOL = 1e-7
PROBE_POINTS = 256


@dataclass(frozen=True)
class SolverReport:
    kappa: int
    kappa1: int
    solvable: bool
    hankel_spectrum: tuple[float, ...]
    diagnostics: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)


def check(r: Realization, kappa: int, tol_inertia: float | None = None,
          tol_rank: float = RANK_TOL) -> SolverReport:
    """Decide solvability from the inertia of ``I - PQ``.

    The index is computed twice, from ``I - P^{1/2} Q P^{1/2}`` and from the
    Pick matrix ``P^{-1} - Q``; the two are congruent and must agree.
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    minimality = r.require_minimal(tol_rank)
    g = gramians(r)
    effective_tol = default_tol_inertia(g.P, g.Q) if tol_inertia is None else tol_inertia
    kappa1 = negativity_index(g, effective_tol)
    pick = pick_matrix(r, g)
    if pick.kappa1 != kappa1:
        raise CrossCheckFailure(
            f"nu_-(I - PQ) = {kappa1} but nu_-(P^-1 - Q) = {pick.kappa1}"
        )
    diagnostics = {
        "spectral_radius": minimality.spectral_radius,
        "rank_Xi": minimality.rank_Xi,
        "rank_Omega": minimality.rank_Omega,
        "residual_P": g.residual_P,
        "residual_Q": g.residual_Q,
        "cond_P": pick.cond_P,
        "pick_discrepancy": pick.discrepancy,
    }
    return SolverReport(
        kappa=int(kappa),
        kappa1=kappa1,
        solvable=kappa1 <= kappa,
        hankel_spectrum=tuple(float(x) for x in hankel_spectrum(g)),
        diagnostics=diagnostics,
        tolerances={"tol_rank": tol_rank, "tol_inertia": float(effective_tol)},
    )


def solve(r: Realization, kappa: int, tol_inertia: float | None = None) -> GammaGeneratingMatrix:
    """Resolvent matrix for budget ``kappa``; :class:`NotSolvable` if ``kappa < kappa1``."""
    rd = assemble(r, tol_inertia=tol_inertia)
    if kappa < rd.kappa1:
        raise NotSolvable(f"kappa = {kappa} is below the negativity index {rd.kappa1}")
    return GammaGeneratingMatrix(rd)


@dataclass(frozen=True)
class SchurParameter:
    """Parameter ``eps = value / b(mu)`` with ``b`` a scalar Blaschke product.

    With no zeros this is a constant contraction. Otherwise ``eps`` has one
    pole per zero of ``b`` and ``value`` must be a strict contraction.
    """

    value: np.ndarray
    zeros: tuple[complex, ...] = ()

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.value, dtype=complex))
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "zeros", tuple(complex(a) for a in self.zeros))
        norm = float(np.linalg.norm(v, 2))
        if self.zeros:
            if norm >= 1:
                raise ValueError(f"Blaschke-scaled parameter needs ||value|| < 1, got {norm:.6g}")
            BlaschkeProduct.scalar(self.zeros)  # validates |alpha| < 1
        elif norm > 1 + 1e-12:
            raise ValueError(f"constant parameter needs ||value|| <= 1, got {norm:.6g}")

    @classmethod
    def zero(cls, p: int, q: int) -> "SchurParameter":
        return cls(np.zeros((p, q)))

    @property
    def kind(self) -> str:
        return "blaschke_scaled" if self.zeros else "constant"

    @property
    def pole_count(self) -> int:
        return len(self.zeros)

    def blaschke(self, mu: complex) -> complex:
        out = 1.0 + 0j
        for a in self.zeros:
            out *= (mu - a) / (1 - mu * np.conj(a))
        return out

    def evaluate(self, mu: complex) -> np.ndarray:
        return self.value / self.blaschke(mu)


@dataclass(frozen=True)
class SolutionHandle:
    """``f = T[eps]`` evaluated pointwise.

    For ``eps = c / b`` the fraction is cleared by ``b``:
    ``f = (a11 c + a12 b)(a21 c + a22 b)^{-1}``, which stays finite at the
    zeros of ``b``. A general evaluator can be injected through ``eps_fn``.
    """

    resolvent: GammaGeneratingMatrix
    eps: SchurParameter | None
    eps_fn: Callable[[complex], np.ndarray] | None = None
    singular_probe_points: tuple[float, ...] = ()

    @property
    def p(self) -> int:
        return self.resolvent.p

    @property
    def q(self) -> int:
        return self.resolvent.q

    def _parts(self, mu):
        if self.eps_fn is not None:
            c = np.atleast_2d(np.asarray(self.eps_fn(mu), dtype=complex))
            if not np.all(np.isfinite(c)):
                raise SingularEvaluation(f"parameter is not finite at {mu}")
            return c, 1.0
        return self.eps.value, self.eps.blaschke(mu)

    def evaluate(self, mu: complex) -> np.ndarray:
        mu = complex(mu)
        a = self.resolvent.evaluate(mu)
        c, b = self._parts(mu)
        p = self.p
        num = a[:p, :p] @ c + a[:p, p:] * b
        den = a[p:, :p] @ c + a[p:, p:] * b
        ref = np.linalg.norm(np.vstack([num, den]), 2)
        return checked_solve(den.T, num.T, "a21 eps + a22", ref).T

    def evaluate_many(self, mus) -> np.ndarray:
        mus = np.asarray(mus, dtype=complex).ravel()
        if self.eps_fn is not None:
            return np.stack([self.evaluate(mu) for mu in mus])
        a = self.resolvent.evaluate_many(mus)
        b = np.array([self.eps.blaschke(mu) for mu in mus])[:, None, None]
        c = self.eps.value
        p = self.p
        num = a[:, :p, :p] @ c + a[:, :p, p:] * b
        den = a[:, p:, :p] @ c + a[:, p:, p:] * b
        ref = np.linalg.norm(np.concatenate([num, den], axis=1), 2, axis=(1, 2))
        sol = checked_solve(np.swapaxes(den, 1, 2), np.swapaxes(num, 1, 2), "a21 eps + a22", ref)
        return np.swapaxes(sol, 1, 2)

    def circle_values(self, points: int):
        """Values on ``points`` roots of unity; singular points are moved to
        ``(1 - 1e-9) mu`` and their angles returned."""
        mus = unit_circle(points)
        try:
            return self.evaluate_many(mus), []
        except NehariError:
            pass
        vals, moved = [], []
        for i, mu in enumerate(mus):
            try:
                vals.append(self.evaluate(mu))
            except SingularEvaluation:
                vals.append(self.evaluate((1 - 1e-9) * mu))
                moved.append(float(2 * np.pi * i / points))
        return np.stack(vals), moved


def sample_solution(G: GammaGeneratingMatrix, eps, kappa: int | None = None) -> SolutionHandle:
    """Solution handle for the parameter ``eps``.

    ``eps`` is a :class:`SchurParameter` or a callable returning ``p x q``
    matrices (accepted as is, for verification of general parameters).
    """
    if isinstance(eps, SchurParameter):
        if eps.value.shape != (G.p, G.q):
            raise DimensionMismatch(f"eps must be {G.p} x {G.q}, got {eps.value.shape}")
        if kappa is not None and eps.pole_count > kappa - G.kappa1:
            raise ValueError(
                f"eps has {eps.pole_count} poles, budget allows {kappa - G.kappa1}"
            )
        handle = SolutionHandle(G, eps)
    elif callable(eps):
        handle = SolutionHandle(G, None, eps_fn=eps)
    else:
        raise TypeError("eps must be a SchurParameter or a callable")
    mus = unit_circle(PROBE_POINTS)
    bad = []
    for i, mu in enumerate(mus):
        try:
            handle.evaluate(mu)
        except SingularEvaluation:
            bad.append(float(2 * np.pi * i / PROBE_POINTS))
    if len(bad) > 0.1 * PROBE_POINTS:
        raise DenominatorSingularEverywhere(
            f"a21 eps + a22 singular at {len(bad)} of {PROBE_POINTS} probe points"
        )
    return SolutionHandle(handle.resolvent, handle.eps, handle.eps_fn, tuple(bad))


@dataclass(frozen=True)
class VerifyReport:
    sup_norm: float
    hankel_rank: int
    difference_singular_values: tuple[float, ...]
    kappa: int
    passed: bool
    coefficient_tail: float
    perturbed_points: tuple[float, ...]
    tolerances: dict


def verify_solution(h: SolutionHandle, r: Realization, kappa: int,
                    sup_points: int = VERIFY_SUP_POINTS, coeffs: int = VERIFY_COEFFS,
                    fft_points: int = VERIFY_FFT_POINTS, rel_tol: float = HANKEL_REL_TOL,
                    sup_tol: float = SUP_TOL) -> VerifyReport:
    """Check ``||f||_inf <= 1`` on a circle grid and the Hankel rank of
    ``gamma_k(f) - gamma_k(f0)`` against ``kappa``."""
    if (h.p, h.q) != (r.p, r.q):
        raise DimensionMismatch("solution and realization have different shapes")
    vals, moved = h.circle_values(sup_points)
    sup = float(np.max(np.linalg.norm(vals, 2, axis=(1, 2))))
    series = fourier_coefficients(h, fft_points, coeffs)
    g0 = markov_sequence(r, coeffs)
    diff = series.coeffs - g0
    scale = max(HankelMatrix.from_coefficients(series.coeffs).singular_values()[0],
                HankelMatrix.from_coefficients(g0).singular_values()[0])
    rank = hankel_rank(diff, rel_tol, scale=scale)
    sv = HankelMatrix.from_coefficients(diff).singular_values()
    return VerifyReport(
        sup_norm=sup,
        hankel_rank=rank,
        difference_singular_values=tuple(float(x) for x in sv),
        kappa=int(kappa),
        passed=bool(sup <= 1 + sup_tol and rank <= kappa),
        coefficient_tail=series.tail,
        perturbed_points=tuple(moved) + series.perturbed,
        tolerances={
            "sup_tol": sup_tol, "rel_tol_rank": rel_tol, "sup_points": sup_points,
            "coeffs": coeffs, "fft_points": fft_points,
        },
    )


def hankel_inertia(r: Realization, N: int = 256, tol: float = 1e-9) -> int:
    """``nu_-(I - Gamma_N^* Gamma_N)`` for the ``N x N`` block section of the
    Hankel matrix of ``f0``."""
    H = HankelMatrix.from_coefficients(markov_sequence(r, 2 * N - 1), N, N).array
    w = np.linalg.eigvalsh(np.eye(H.shape[1]) - H.conj().T @ H)
    return int(np.sum(w < -tol))


def random_problem(n: int, p: int, q: int, kappa1: int, rng: np.random.Generator,
                   radius: float = 0.8, min_ratio: float = 1.2,
                   max_tries: int = 100) -> Realization:
    """Random minimal realization with ``nu_-(I - PQ) = kappa1``.

    ``C`` is rescaled so the threshold 1 sits at the geometric mean of two
    neighbouring Hankel singular values, keeping the inertia well separated.
    """
    if not 0 <= kappa1 <= n:
        raise ValueError("need 0 <= kappa1 <= n")
    for _ in range(max_tries):
        r = random_realization(n, p, q, rng, radius)
        sv = hankel_spectrum(gramians(r))
        if kappa1 == 0:
            c = 1 / (1.5 * sv[0])
        elif kappa1 == n:
            c = 1.5 / sv[-1]
        else:
            hi, lo = sv[kappa1 - 1], sv[kappa1]
            if lo <= 0 or hi / lo < min_ratio:
                continue
            c = 1 / np.sqrt(hi * lo)
        out = Realization(r.A, r.B, c * r.C)
        try:
            out.require_minimal()
            if negativity_index(gramians(out)) == kappa1:
                return out
        except NehariError:
            continue
    raise RuntimeError("could not draw an instance with the requested index")
