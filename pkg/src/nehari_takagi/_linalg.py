"""Small dense linear-algebra helpers shared by the modules."""

from __future__ import annotations

import numpy as np

from .errors import SingularEvaluation

# condition number above which a solve is treated as singular
SINGULAR_COND = 1e12


def as_complex_matrix(x, name: str = "matrix") -> np.ndarray:
    a = np.array(x, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        raise ValueError(f"{name} must be two-dimensional, got shape {a.shape}")
    if a.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {a.shape}")
    return a


def frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def ctr(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose of the trailing two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def hermitian_part(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + ctr(x))


def checked_solve(m: np.ndarray, rhs: np.ndarray, what: str = "matrix",
                  ref: np.ndarray | float | None = None) -> np.ndarray:
    """Solve ``m @ x = rhs``; raise SingularEvaluation above ``SINGULAR_COND``.

    Works on stacks: ``m`` of shape (..., n, n) and ``rhs`` of shape (..., n, k).
    With ``ref`` the smallest singular value of ``m`` is also judged against
    ``ref`` (per stack entry), which catches 1 x 1 systems that are merely tiny.
    """
    m = np.asarray(m)
    if not np.all(np.isfinite(m)):
        raise SingularEvaluation(f"{what} has non-finite entries")
    sig = np.linalg.svd(m, compute_uv=False)
    top = sig[..., 0] if ref is None else np.maximum(sig[..., 0], ref)
    bad = sig[..., -1] * SINGULAR_COND <= top
    if np.any(bad):
        with np.errstate(divide="ignore", invalid="ignore"):
            cond = np.max(top / sig[..., -1])
        raise SingularEvaluation(f"{what} is numerically singular (cond={cond:.3e})")
    return np.linalg.solve(m, rhs)


def numerical_rank(a: np.ndarray, rtol: float = 1e-10, atol: float = 0.0) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] <= atol:
        return 0
    return int(np.sum(s > max(rtol * s[0], atol)))


def inertia(h: np.ndarray, tol: float) -> tuple[int, int, int]:
    """(nu_plus, nu_minus, nu_zero) of a Hermitian matrix with a symmetric dead band."""
    w = np.linalg.eigvalsh(hermitian_part(h))
    return int(np.sum(w > tol)), int(np.sum(w < -tol)), int(np.sum(np.abs(w) <= tol))


def psd_sqrt(h: np.ndarray) -> np.ndarray:
    """Square root of a Hermitian positive semidefinite matrix (negative roundoff clipped)."""
    w, v = np.linalg.eigh(hermitian_part(h))
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def unit_circle(n: int) -> np.ndarray:
    """``n`` equispaced points ``exp(2 pi i k / n)``, starting at 1."""
    return np.exp(2j * np.pi * np.arange(n) / n)
