"""State-space realizations ``f0(z) = C (zI - A)^{-1} B`` on the unit disk."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import as_complex_matrix, checked_solve, frozen, numerical_rank
from .errors import DimensionMismatch, NotMinimal, Unstable

# rho(A) >= 1 - STABILITY_MARGIN is rejected
STABILITY_MARGIN = 1e-12
RANK_TOL = 1e-10


def rho_omega(lam: complex, omega: complex) -> complex:
    """Disk kernel denominator ``1 - lam * conj(omega)``."""
    return 1.0 - lam * np.conj(omega)


def reflect(lam: complex) -> complex:
    """Reflection in the unit circle, ``1 / conj(lam)``."""
    if lam == 0:
        raise ZeroDivisionError("0 has no reflection in the unit circle")
    return 1.0 / np.conj(lam)


def spectral_radius(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(a))))


@dataclass(frozen=True)
class Realization:
    """Stable realization of a strictly proper rational ``p x q`` function.

    Matrices are stored as read-only complex arrays. Construction checks
    dimensions, finiteness and ``rho(A) < 1``; minimality is reported by
    :func:`validate` and enforced by :meth:`require_minimal`.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        try:
            A = as_complex_matrix(self.A, "A")
            B = as_complex_matrix(self.B, "B")
            C = as_complex_matrix(self.C, "C")
        except ValueError as exc:
            raise DimensionMismatch(str(exc)) from None
        n = A.shape[0]
        if A.shape != (n, n) or n == 0:
            raise DimensionMismatch(f"A must be square and nonempty, got {A.shape}")
        if B.shape[0] != n or B.shape[1] == 0:
            raise DimensionMismatch(f"B must be {n} x q with q >= 1, got {B.shape}")
        if C.shape[1] != n or C.shape[0] == 0:
            raise DimensionMismatch(f"C must be p x {n} with p >= 1, got {C.shape}")
        for name, mat in (("A", A), ("B", B), ("C", C)):
            if not np.all(np.isfinite(mat)):
                raise DimensionMismatch(f"{name} has non-finite entries")
        rho = spectral_radius(A)
        if rho >= 1.0 - STABILITY_MARGIN:
            raise Unstable(f"spectral radius of A is {rho:.17g}, need < 1")
        object.__setattr__(self, "A", frozen(A))
        object.__setattr__(self, "B", frozen(B))
        object.__setattr__(self, "C", frozen(C))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def q(self) -> int:
        return self.B.shape[1]

    @property
    def spectral_radius(self) -> float:
        return spectral_radius(self.A)

    def require_minimal(self, tol: float = RANK_TOL) -> "MinimalityReport":
        report = validate(self, tol)
        if not report.minimal:
            raise NotMinimal(
                f"realization is not minimal: rank Xi={report.rank_Xi}, "
                f"rank Omega={report.rank_Omega}, n={self.n}"
            )
        return report


@dataclass(frozen=True)
class MinimalityReport:
    controllable: bool
    observable: bool
    spectral_radius: float
    rank_Xi: int
    rank_Omega: int

    @property
    def minimal(self) -> bool:
        return self.controllable and self.observable


def kalman_matrices(r: Realization) -> tuple[np.ndarray, np.ndarray]:
    """Controllability matrix ``[B, AB, ..., A^{n-1}B]`` and observability
    matrix ``[C; CA; ...; CA^{n-1}]``."""
    n = r.n
    xi_blocks = [r.B]
    om_blocks = [r.C]
    for _ in range(n - 1):
        xi_blocks.append(r.A @ xi_blocks[-1])
        om_blocks.append(om_blocks[-1] @ r.A)
    return np.hstack(xi_blocks), np.vstack(om_blocks)


def validate(r: Realization, tol: float = RANK_TOL) -> MinimalityReport:
    """Kalman ranks (singular values above ``tol * sigma_max``) and ``rho(A)``."""
    xi, om = kalman_matrices(r)
    rx = numerical_rank(xi, tol)
    ro = numerical_rank(om, tol)
    return MinimalityReport(
        controllable=rx == r.n,
        observable=ro == r.n,
        spectral_radius=r.spectral_radius,
        rank_Xi=rx,
        rank_Omega=ro,
    )


def evaluate(r: Realization, z: complex) -> np.ndarray:
    """``f0(z)`` by a direct linear solve."""
    z = complex(z)
    x = checked_solve(z * np.eye(r.n) - r.A, r.B, "zI - A")
    return r.C @ x


def evaluate_many(r: Realization, zs) -> np.ndarray:
    """``f0`` on an array of points; returns shape ``(len(zs), p, q)``."""
    zs = np.asarray(zs, dtype=complex).ravel()
    eye = np.eye(r.n)
    m = zs[:, None, None] * eye - r.A
    x = checked_solve(m, np.broadcast_to(r.B, (zs.size,) + r.B.shape), "zI - A")
    return r.C @ x


def markov(r: Realization, k: int) -> np.ndarray:
    """``k``-th Fourier coefficient ``C A^{k-1} B`` (``k >= 1``)."""
    if k < 1:
        raise ValueError("Markov index starts at 1")
    return r.C @ np.linalg.matrix_power(r.A, k - 1) @ r.B


def markov_sequence(r: Realization, count: int) -> np.ndarray:
    """First ``count`` Markov coefficients stacked as ``(count, p, q)``."""
    out = np.empty((count, r.p, r.q), dtype=complex)
    x = r.B
    for k in range(count):
        out[k] = r.C @ x
        x = r.A @ x
    return out


def random_realization(n: int, p: int, q: int, rng: np.random.Generator,
                       radius: float = 0.8) -> Realization:
    """I.i.d. standard complex normal entries with ``A`` rescaled to spectral radius ``radius``."""

    def cn(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)

    A = cn(n, n)
    A *= radius / spectral_radius(A)
    return Realization(A, cn(n, q), cn(p, n))
