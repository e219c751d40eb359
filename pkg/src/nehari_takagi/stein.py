"""Stein equations, gramians, Hankel singular values and the Pick matrix."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import checked_solve, ctr, frozen, hermitian_part, inertia, psd_sqrt
from .errors import (
    BoundaryDegenerate,
    CrossCheckFailure,
    IllConditioned,
    IndefiniteGramian,
    NotConvergent,
    Unstable,
)
from .realization import STABILITY_MARGIN, Realization, spectral_radius

STEIN_RTOL = 1e-10
MAX_DOUBLINGS = 60
UPDATE_RTOL = 1e-14
MAX_REFINEMENTS = 3
MAX_COND_P = 1e12
CROSS_CHECK_RTOL = 1e-8


def default_tol_inertia(P: np.ndarray, Q: np.ndarray) -> float:
    return 1e-9 * (1.0 + np.linalg.norm(P @ Q, 2))


def _doubling(A: np.ndarray, R: np.ndarray) -> np.ndarray:
    X = R.copy()
    Ak = A.copy()
    for _ in range(MAX_DOUBLINGS):
        update = Ak @ X @ ctr(Ak)
        X = X + update
        Ak = Ak @ Ak
        if np.linalg.norm(update) <= UPDATE_RTOL * max(np.linalg.norm(X), 1e-300):
            break
    return X


def stein_residual(A: np.ndarray, X: np.ndarray, R: np.ndarray,
                   orientation: str = "forward") -> float:
    """Frobenius norm of ``X - A X A^* - R`` (or ``X - A^* X A - R``)."""
    T = A if orientation == "forward" else ctr(A)
    return float(np.linalg.norm(X - T @ X @ ctr(T) - R))


def solve_stein(A, R, orientation: str = "forward", rtol: float = STEIN_RTOL) -> np.ndarray:
    """Solve a discrete Stein equation by squared-iterate doubling.

    Parameters
    ----------
    A : (n, n) array_like
        Stable matrix, ``rho(A) < 1``.
    R : (n, n) array_like
        Hermitian right-hand side, possibly indefinite.
    orientation : {"forward", "adjoint"}
        ``"forward"`` solves ``X - A X A^* = R``; ``"adjoint"`` solves
        ``X - A^* X A = R``.

    Returns
    -------
    X : (n, n) ndarray
        Hermitian solution. A few residual-correction sweeps are applied when
        the plain doubling result misses ``rtol``.
    """
    A = np.asarray(A, dtype=complex)
    R = np.asarray(R, dtype=complex)
    if orientation not in ("forward", "adjoint"):
        raise ValueError(f"unknown orientation {orientation!r}")
    if spectral_radius(A) >= 1.0 - STABILITY_MARGIN:
        raise Unstable("Stein solver needs rho(A) < 1")
    T = A if orientation == "forward" else ctr(A)
    R = hermitian_part(R)
    X = hermitian_part(_doubling(T, R))
    for _ in range(MAX_REFINEMENTS + 1):
        E = R - (X - T @ X @ ctr(T))
        if np.linalg.norm(E) <= rtol * max(1.0, np.linalg.norm(X)):
            return X
        X = hermitian_part(X + _doubling(T, hermitian_part(E)))
    res = stein_residual(A, X, R, orientation)
    raise NotConvergent(f"Stein residual {res:.3e} above tolerance after refinement")


@dataclass(frozen=True)
class GramianPair:
    """Controllability gramian ``P`` and observability gramian ``Q``."""

    P: np.ndarray
    Q: np.ndarray
    residual_P: float = 0.0
    residual_Q: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "P", frozen(self.P))
        object.__setattr__(self, "Q", frozen(self.Q))


def gramians(r: Realization) -> GramianPair:
    BB = r.B @ ctr(r.B)
    CC = ctr(r.C) @ r.C
    P = solve_stein(r.A, BB, "forward")
    Q = solve_stein(r.A, CC, "adjoint")
    return GramianPair(
        P, Q,
        residual_P=stein_residual(r.A, P, BB, "forward"),
        residual_Q=stein_residual(r.A, Q, CC, "adjoint"),
    )


def _check_psd(X: np.ndarray, name: str) -> None:
    w = np.linalg.eigvalsh(hermitian_part(X))
    tol = 1e-10 * max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    if w.size and w[0] < -tol:
        raise IndefiniteGramian(f"{name} has eigenvalue {w[0]:.3e} < 0")


def _sym_product(g: GramianPair) -> np.ndarray:
    """``P^{1/2} Q P^{1/2}``, Hermitian and similar to ``PQ``."""
    s = psd_sqrt(g.P)
    return hermitian_part(s @ g.Q @ s)


def hankel_spectrum(g: GramianPair) -> np.ndarray:
    """Hankel singular values ``sqrt(eig(PQ))`` in descending order."""
    _check_psd(g.P, "P")
    _check_psd(g.Q, "Q")
    w = np.linalg.eigvalsh(_sym_product(g))
    return np.sqrt(np.clip(w, 0.0, None))[::-1]


def negativity_index(g: GramianPair, tol_inertia: float | None = None) -> int:
    """Number of negative eigenvalues of ``I - P^{1/2} Q P^{1/2}``.

    Raises :class:`BoundaryDegenerate` when an eigenvalue falls inside the
    band ``(-tol_inertia, tol_inertia)``.
    """
    _check_psd(g.P, "P")
    if tol_inertia is None:
        tol_inertia = default_tol_inertia(g.P, g.Q)
    n = g.P.shape[0]
    _, neg, zero = inertia(np.eye(n) - _sym_product(g), tol_inertia)
    if zero:
        raise BoundaryDegenerate(
            f"{zero} eigenvalue(s) of I - PQ within {tol_inertia:.3e} of zero"
        )
    return neg


@dataclass(frozen=True)
class PickData:
    P_tilde: np.ndarray
    C_tilde: np.ndarray
    kappa1: int
    discrepancy: float
    cond_P: float
    P_tilde_stein: np.ndarray = field(repr=False, default=None)


def cond_checked(P: np.ndarray) -> float:
    c = float(np.linalg.cond(P))
    if not np.isfinite(c) or c > MAX_COND_P:
        raise IllConditioned(f"gramian P has condition number {c:.3e} > {MAX_COND_P:.0e}")
    return c


def c_tilde(r: Realization, g: GramianPair) -> np.ndarray:
    """Stacked output matrix ``[C; B^*(I-A^*)^{-1} P^{-1} (I-A)]``."""
    n = r.n
    eye = np.eye(n)
    lower = ctr(r.B) @ checked_solve(eye - ctr(r.A), checked_solve(g.P, eye - r.A, "P"), "I - A^*")
    return np.vstack([r.C, lower])


def pick_matrix(r: Realization, g: GramianPair, tol_inertia: float | None = None) -> PickData:
    """Pick matrix by two independent routes.

    The Stein route solves ``A^* X A - X = C~^* j C~``; the closed route is
    ``P^{-1} - Q``. They must agree to ``1e-8 * ||X||``.
    """
    cond = cond_checked(g.P)
    ct = c_tilde(r, g)
    j = np.diag(np.concatenate([np.ones(r.p), -np.ones(r.q)]))
    rhs = ctr(ct) @ j @ ct
    via_stein = solve_stein(r.A, -rhs, "adjoint")
    closed = hermitian_part(np.linalg.inv(g.P) - g.Q)
    scale = max(np.linalg.norm(closed), np.finfo(float).tiny)
    disc = float(np.linalg.norm(via_stein - closed))
    if disc > CROSS_CHECK_RTOL * scale:
        raise CrossCheckFailure(
            f"Pick matrix routes disagree: {disc:.3e} vs scale {scale:.3e}"
        )
    if tol_inertia is None:
        # congruent to I - P^{1/2} Q P^{1/2} through P^{-1/2}; scale the band accordingly
        tol_inertia = default_tol_inertia(g.P, g.Q) / np.linalg.norm(g.P, 2)
    _, neg, zero = inertia(closed, tol_inertia)
    if zero:
        raise BoundaryDegenerate("Pick matrix is numerically singular")
    return PickData(closed, ct, neg, disc, cond, via_stein)
