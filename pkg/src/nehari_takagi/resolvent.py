"""The resolvent matrix of the rational Nehari-Takagi problem.

For a minimal stable realization with gramians ``P, Q`` and ``1 not in sigma(PQ)``::

    M = diag(-A, I),  N = diag(-I, A^*),  Lambda = [[-Q, I], [I, -P]]
    G(z) = diag(C, B^*) (M - zN)^{-1}
    Afrak(mu) = I_m - (1 - mu) G(mu) Lambda^{-1} G(1)^* j

where ``j = diag(I_p, -I_q)``. ``Afrak`` is j-unitary on the circle, equals
``I_m`` at ``mu = 1`` and its lower-left block ratio ``s21 = -a22^{-1} a21``
has exactly ``kappa1 = nu_-(I - PQ)`` poles in the disk.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import checked_solve, ctr, frozen, hermitian_part, inertia, unit_circle
from .errors import BlockSingular, DimensionMismatch, GridTooCoarse, NotOnCircle
from .hankel import hankel_rank
from .realization import Realization
from .stein import GramianPair, gramians, negativity_index

CIRCLE_TOL = 1e-12
BLOCK_COND = 1e12


def signature(p: int, q: int) -> np.ndarray:
    """``j_pq = diag(I_p, -I_q)``."""
    return np.diag(np.concatenate([np.ones(p), -np.ones(q)])).astype(complex)


@dataclass(frozen=True)
class ResolventData:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    M: np.ndarray
    N: np.ndarray
    Lambda: np.ndarray
    Lambda_inv: np.ndarray
    G1_star: np.ndarray
    j_pq: np.ndarray
    kappa1: int
    diagnostics: dict = field(default_factory=dict, compare=False)

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
    def m(self) -> int:
        return self.p + self.q

    @classmethod
    def from_matrices(cls, A, B, C, Lambda, kappa1: int, Lambda_inv=None, diagnostics=None):
        """Rebuild from stored matrices (used when reloading an export)."""
        A, B, C, Lambda = (np.asarray(x, dtype=complex) for x in (A, B, C, Lambda))
        n = A.shape[0]
        if Lambda.shape != (2 * n, 2 * n):
            raise DimensionMismatch(f"Lambda must be {2 * n} x {2 * n}, got {Lambda.shape}")
        eye = np.eye(n)
        zero = np.zeros((n, n))
        M = np.block([[-A, zero], [zero, eye]])
        N = np.block([[-eye, zero], [zero, ctr(A)]])
        if Lambda_inv is None:
            Lambda_inv = np.linalg.inv(Lambda)
        p, q = C.shape[0], B.shape[1]
        G1 = _g(A, B, C, 1.0)
        return cls(
            frozen(A), frozen(B), frozen(C), frozen(M), frozen(N), frozen(Lambda),
            frozen(Lambda_inv), frozen(ctr(G1)), frozen(signature(p, q)), int(kappa1),
            dict(diagnostics or {}),
        )


def _g(A, B, C, z):
    """``G(z)`` for scalar ``z``: two independent ``n x n`` solves."""
    n = A.shape[0]
    eye = np.eye(n)
    top = C @ checked_solve(z * eye - A, eye, "zI - A")
    bottom = ctr(B) @ checked_solve(eye - z * ctr(A), eye, "I - zA^*")
    p, q = C.shape[0], B.shape[1]
    out = np.zeros((p + q, 2 * n), dtype=complex)
    out[:p, :n] = top
    out[p:, n:] = bottom
    return out


def _g_many(A, B, C, zs):
    n = A.shape[0]
    eye = np.eye(n)
    k = zs.size
    ident = np.broadcast_to(eye, (k, n, n))
    top = C @ checked_solve(zs[:, None, None] * eye - A, ident, "zI - A")
    bottom = ctr(B) @ checked_solve(eye - zs[:, None, None] * ctr(A), ident, "I - zA^*")
    p, q = C.shape[0], B.shape[1]
    out = np.zeros((k, p + q, 2 * n), dtype=complex)
    out[:, :p, :n] = top
    out[:, p:, n:] = bottom
    return out


def assemble(r: Realization, g: GramianPair | None = None,
             tol_inertia: float | None = None) -> ResolventData:
    """Build ``M, N, Lambda, Lambda^{-1}, G(1)^*`` and record ``kappa1``.

    Raises :class:`BoundaryDegenerate` when ``1`` is numerically in ``sigma(PQ)``.
    """
    r.require_minimal()
    if g is None:
        g = gramians(r)
    kappa1 = negativity_index(g, tol_inertia)
    n = r.n
    eye = np.eye(n)
    Lam = np.block([[-g.Q, eye], [eye, -g.P]])
    Lam = hermitian_part(Lam)
    cond = float(np.linalg.cond(Lam))
    Lam_inv = hermitian_part(np.linalg.inv(Lam))
    _, neg_lam, _ = inertia(Lam, 0.0)
    diagnostics = {
        "cond_Lambda": cond,
        "nu_minus_Lambda": neg_lam,
        "residual_P": g.residual_P,
        "residual_Q": g.residual_Q,
    }
    return ResolventData.from_matrices(r.A, r.B, r.C, Lam, kappa1, Lam_inv, diagnostics)


def g_evaluate(rd: ResolventData, z: complex) -> np.ndarray:
    """``G(z) = diag(C, B^*) (M - zN)^{-1}``, an ``m x 2n`` matrix."""
    return _g(rd.A, rd.B, rd.C, complex(z))


@dataclass(frozen=True)
class GammaGeneratingMatrix:
    """Pointwise evaluator of ``Afrak(mu)`` with block accessors."""

    data: ResolventData

    def __post_init__(self):
        # Lambda^{-1} G(1)^* j is shared by every evaluation; computed once here
        right = self.data.Lambda_inv @ self.data.G1_star @ self.data.j_pq
        object.__setattr__(self, "_right", frozen(right))

    @property
    def p(self) -> int:
        return self.data.p

    @property
    def q(self) -> int:
        return self.data.q

    @property
    def m(self) -> int:
        return self.data.m

    @property
    def kappa1(self) -> int:
        return self.data.kappa1

    def evaluate(self, mu: complex) -> np.ndarray:
        mu = complex(mu)
        return np.eye(self.m) - (1 - mu) * g_evaluate(self.data, mu) @ self._right

    def evaluate_many(self, mus) -> np.ndarray:
        mus = np.asarray(mus, dtype=complex).ravel()
        G = _g_many(self.data.A, self.data.B, self.data.C, mus)
        return np.eye(self.m) - (1 - mus)[:, None, None] * (G @ self._right)

    def blocks(self, mu: complex):
        """``(a11, a12, a21, a22)`` at ``mu``."""
        return split_blocks(self.evaluate(mu), self.p)


def split_blocks(value: np.ndarray, p: int):
    return value[..., :p, :p], value[..., :p, p:], value[..., p:, :p], value[..., p:, p:]


def gamma_evaluate(G: GammaGeneratingMatrix, mu: complex) -> np.ndarray:
    return G.evaluate(mu)


def _require_circle(mu: complex) -> None:
    if abs(abs(mu) - 1.0) > CIRCLE_TOL:
        raise NotOnCircle(f"|mu| = {abs(mu):.17g} is not 1")


def j_unitarity_defect(G: GammaGeneratingMatrix, mu: complex) -> float:
    """``||Afrak(mu) j Afrak(mu)^* - j||_F`` for ``|mu| = 1``."""
    _require_circle(mu)
    a = G.evaluate(mu)
    j = G.data.j_pq
    return float(np.linalg.norm(a @ j @ ctr(a) - j))


def _block_inverse(x: np.ndarray, what: str, ref: float) -> np.ndarray:
    # relative to the whole matrix too: a 1x1 block has cond 1 even when it is 0
    sig = np.linalg.svd(x, compute_uv=False)
    if not np.all(np.isfinite(sig)) or sig[-1] <= max(sig[0], ref) / BLOCK_COND:
        cond = sig[0] / sig[-1] if sig[-1] > 0 else np.inf
        raise BlockSingular(f"{what} is singular (cond={cond:.3e}, sigma_min={sig[-1]:.3e})")
    return np.linalg.inv(x)


def s21_evaluate(G: GammaGeneratingMatrix, mu: complex) -> tuple[np.ndarray, float]:
    """``s21 = -a22^{-1} a21`` and its distance to ``-a12^* (a11^*)^{-1}``."""
    value = G.evaluate(mu)
    ref = float(np.linalg.norm(value, 2))
    a11, a12, a21, a22 = split_blocks(value, G.p)
    s21 = -_block_inverse(a22, "a22", ref) @ a21
    other = -ctr(a12) @ _block_inverse(ctr(a11), "a11^*", ref)
    return s21, float(np.linalg.norm(s21 - other))


def winding_number(values: np.ndarray) -> int:
    """Winding number about 0 of a closed sampled curve (last point joins the first).

    Raises :class:`GridTooCoarse` when a phase step exceeds ``pi/2``.
    """
    values = np.asarray(values, dtype=complex)
    if np.any(values == 0):
        raise GridTooCoarse("curve passes through 0")
    steps = np.angle(np.roll(values, -1) / values)
    if np.max(np.abs(steps)) > np.pi / 2:
        raise GridTooCoarse(f"phase increment {np.max(np.abs(steps)):.3f} exceeds pi/2")
    return int(round(float(np.sum(steps)) / (2 * np.pi)))


@dataclass(frozen=True)
class MembershipReport:
    grid_size: int
    max_j_defect: float
    s21_pole_count: int
    s21_tail: float
    s21_max_norm: float
    s21_discrepancy: float
    winding_det_a22: int
    winding_det_a11_star: int
    min_sigma_a22: float
    min_sigma_a11: float
    kappa1: int

    @property
    def consistent(self) -> bool:
        """Pole count and both winding numbers agree with ``kappa1``."""
        return (
            self.s21_pole_count == self.kappa1
            and self.winding_det_a22 == self.kappa1
            and self.winding_det_a11_star == self.kappa1
        )


def membership_report(G: GammaGeneratingMatrix, grid_size: int = 1024,
                      coeffs: int = 48, rel_tol: float = 1e-6) -> MembershipReport:
    """Numerical evidence that ``Afrak`` is a generalized gamma-generating matrix.

    (i) j-unitarity on the circle grid; (ii) number of disk poles of ``s21``
    as the Hankel rank of its Fourier coefficients; (iii) winding numbers of
    ``det a22`` and ``det a11^*`` around the circle, which count zeros in the
    disk of ``a22`` and of ``a11^#`` when ``a1, a2`` are outer.
    """
    coeffs = min(coeffs, grid_size // 4)
    mus = unit_circle(grid_size)
    vals = G.evaluate_many(mus)
    j = G.data.j_pq
    defects = np.linalg.norm(vals @ j @ ctr(vals) - j, axis=(1, 2))
    a11, a12, a21, a22 = split_blocks(vals, G.p)
    sig22 = np.linalg.svd(a22, compute_uv=False)[:, -1]
    sig11 = np.linalg.svd(a11, compute_uv=False)[:, -1]
    if np.min(sig22) < 1e-12 or np.min(sig11) < 1e-12:
        raise BlockSingular("a22 or a11 is singular on the circle grid")
    s21 = -np.linalg.solve(a22, a21)
    other = -ctr(a12) @ np.linalg.inv(ctr(a11))
    s21_coeffs, s21_tail = _series_from_samples(s21, coeffs)
    scale = float(np.max(np.linalg.norm(s21, 2, axis=(1, 2))))
    poles = hankel_rank(s21_coeffs, rel_tol, scale=scale)
    return MembershipReport(
        grid_size=grid_size,
        max_j_defect=float(np.max(defects)),
        s21_pole_count=poles,
        s21_tail=s21_tail,
        s21_max_norm=scale,
        s21_discrepancy=float(np.max(np.linalg.norm(s21 - other, axis=(1, 2)))),
        winding_det_a22=winding_number(np.linalg.det(a22)),
        winding_det_a11_star=winding_number(np.conj(np.linalg.det(a11))),
        min_sigma_a22=float(np.min(sig22)),
        min_sigma_a11=float(np.min(sig11)),
        kappa1=G.kappa1,
    )


def _series_from_samples(values: np.ndarray, K: int):
    # same convention as hankel.fourier_coefficients, on values already sampled
    spectrum = np.fft.ifft(values, axis=0)
    N = values.shape[0]
    tail_block = spectrum[K + 1:N // 2]
    tail = float(np.max(np.linalg.norm(tail_block, axis=(1, 2)))) if len(tail_block) else 0.0
    return spectrum[1:K + 1], tail
