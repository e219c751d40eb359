"""Blaschke-Potapov products and generalized Schur functions on the disk."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._linalg import ctr, frozen, hermitian_part, numerical_rank
from .errors import (
    BlockSingular,
    EvaluationAtPole,
    NehariError,
    NotSchurOnCircle,
    PoleNotCancelled,
    RadiusTooLarge,
    SingularEvaluation,
)

Evaluator = Callable[[complex], np.ndarray]

LAURENT_POINTS = 256
LAURENT_MAX_POINTS = 4096
LAURENT_RTOL = 1e-8
COEFF_TOL = 1e-9
MIN_RADIUS = 1e-3


def blaschke_factor(alpha: complex, lam: complex) -> complex:
    """Scalar factor ``(lam - alpha) / (1 - lam conj(alpha))``."""
    den = 1.0 - lam * np.conj(alpha)
    if den == 0:
        raise SingularEvaluation(f"lam = {lam} is the reflection of alpha = {alpha}")
    return (lam - alpha) / den


@dataclass(frozen=True)
class BPFactor:
    """Elementary factor ``I - P + b_alpha(lam) P`` for an orthogonal projector ``P``."""

    alpha: complex
    projector: np.ndarray

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.projector, dtype=complex))
        if abs(self.alpha) >= 1:
            raise ValueError(f"|alpha| = {abs(self.alpha)} must be < 1")
        if P.shape[0] != P.shape[1]:
            raise ValueError("projector must be square")
        if not (np.allclose(P @ P, P, atol=1e-10) and np.allclose(P, ctr(P), atol=1e-10)):
            raise ValueError("projector must be Hermitian and idempotent")
        if self.rank == 0:
            raise ValueError("projector must be nonzero")
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "projector", frozen(P))

    @classmethod
    def from_vector(cls, alpha: complex, u) -> "BPFactor":
        """Primary factor with projector onto ``span(u)``."""
        u = np.asarray(u, dtype=complex).reshape(-1, 1)
        u = u / np.linalg.norm(u)
        return cls(alpha, u @ ctr(u))

    @property
    def size(self) -> int:
        return self.projector.shape[0]

    @property
    def rank(self) -> int:
        return int(round(float(np.real(np.trace(np.atleast_2d(self.projector))))))

    def evaluate(self, lam: complex) -> np.ndarray:
        P = self.projector
        return np.eye(self.size) - P + blaschke_factor(self.alpha, lam) * P

    def evaluate_inverse(self, lam: complex) -> np.ndarray:
        b = blaschke_factor(self.alpha, lam)
        if b == 0:
            raise SingularEvaluation(f"factor is singular at its zero {self.alpha}")
        P = self.projector
        return np.eye(self.size) - P + P / b


@dataclass(frozen=True)
class BlaschkeProduct:
    """Ordered product ``F_1 F_2 ... F_k`` of elementary factors."""

    factors: tuple[BPFactor, ...]
    size: int

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        for f in self.factors:
            if f.size != self.size:
                raise ValueError(f"factor of size {f.size} in a product of size {self.size}")

    @classmethod
    def identity(cls, size: int) -> "BlaschkeProduct":
        return cls((), size)

    @classmethod
    def scalar(cls, zeros: Sequence[complex]) -> "BlaschkeProduct":
        return cls(tuple(BPFactor(a, np.eye(1)) for a in zeros), 1)

    @property
    def degree(self) -> int:
        return sum(f.rank for f in self.factors)

    @property
    def zeros(self) -> list[complex]:
        return [f.alpha for f in self.factors]

    def prepend(self, factor: BPFactor) -> "BlaschkeProduct":
        return BlaschkeProduct((factor,) + self.factors, self.size)

    def evaluate(self, lam: complex) -> np.ndarray:
        return bp_evaluate(self, lam)

    def evaluate_inverse(self, lam: complex) -> np.ndarray:
        out = np.eye(self.size, dtype=complex)
        for f in reversed(self.factors):
            out = out @ f.evaluate_inverse(lam)
        return out


def bp_evaluate(b: BlaschkeProduct, lam: complex) -> np.ndarray:
    out = np.eye(b.size, dtype=complex)
    for f in b.factors:
        out = out @ f.evaluate(lam)
    return out


def _as_matrix_fn(f: Evaluator) -> Evaluator:
    return lambda lam: np.atleast_2d(np.asarray(f(lam), dtype=complex))


def _trapezoid_laurent(f: Evaluator, lam0: complex, depth: int, radius: float, points: int):
    theta = 2 * np.pi * np.arange(points) / points
    w = np.exp(1j * theta)
    vals = np.stack([f(lam0 + radius * wk) for wk in w])
    scale = float(np.max(np.abs(vals)))
    # phi_{-j} = (1/2 pi i) oint f (lam - lam0)^{j-1} d lam = mean f r^j e^{ij theta}
    coeffs = [np.tensordot(w ** j, vals, axes=(0, 0)) * (radius ** j / points)
              for j in range(depth, 0, -1)]
    return coeffs, scale


def laurent_coefficients(f: Evaluator, lam0: complex, depth: int, radius: float,
                         points: int = LAURENT_POINTS) -> list[np.ndarray]:
    """Principal-part coefficients ``[phi_{-depth}, ..., phi_{-1}]`` at ``lam0``.

    Trapezoid rule on ``|lam - lam0| = radius``; the point count is doubled until
    two consecutive results agree, then the whole computation is repeated at
    half the radius. A change there means another singularity sits inside the
    contour and :class:`RadiusTooLarge` is raised.
    """
    f = _as_matrix_fn(f)

    def converged(r):
        n = points
        prev, scale = _trapezoid_laurent(f, lam0, depth, r, n)
        while n < LAURENT_MAX_POINTS:
            n *= 2
            cur, scale = _trapezoid_laurent(f, lam0, depth, r, n)
            diff = max(np.max(np.abs(a - b)) for a, b in zip(cur, prev))
            size = max(max(np.max(np.abs(a)) for a in cur), 1e-16 * scale * r)
            prev = cur
            if diff <= LAURENT_RTOL * max(size, 1.0):
                break
        return prev, scale

    coeffs, scale = converged(radius)
    half, scale_half = converged(radius / 2)
    diff = max(np.max(np.abs(a - b)) for a, b in zip(coeffs, half))
    size = max(max(np.max(np.abs(a)) for a in coeffs), 1.0)
    if diff > 1e-6 * size:
        raise RadiusTooLarge(
            f"Laurent coefficients at {lam0} change by {diff:.3e} when the radius is halved"
        )
    return coeffs


def _leading_order(coeffs: list[np.ndarray], f_scale: float, radius: float) -> int:
    """Highest ``j`` with ``phi_{-j}`` above roundoff; ``coeffs`` runs from ``-depth`` to ``-1``."""
    depth = len(coeffs)
    for idx, c in enumerate(coeffs):
        j = depth - idx
        if np.max(np.abs(c)) > COEFF_TOL * max(f_scale, 1.0) * radius ** j:
            return j
    return 0


def _circle_scale(f: Evaluator, lam0: complex, radius: float) -> float:
    w = np.exp(2j * np.pi * np.arange(64) / 64)
    return float(max(np.max(np.abs(f(lam0 + radius * wk))) for wk in w))


def toeplitz_principal(coeffs: list[np.ndarray]) -> np.ndarray:
    """Lower-triangular block Toeplitz matrix with ``phi_{-k}`` on the diagonal."""
    k = len(coeffs)
    p, q = coeffs[0].shape
    T = np.zeros((k * p, k * q), dtype=complex)
    for i in range(k):
        for j in range(i + 1):
            T[i * p:(i + 1) * p, j * q:(j + 1) * q] = coeffs[i - j]
    return T


def pole_multiplicity(f: Evaluator, lam0: complex, radius: float = 0.05,
                      depth: int = 8) -> int:
    """Pole multiplicity at ``lam0``: rank of the block Toeplitz matrix of the
    principal part."""
    f = _as_matrix_fn(f)
    scale = _circle_scale(f, lam0, radius)
    while True:
        coeffs = laurent_coefficients(f, lam0, depth, radius)
        order = _leading_order(coeffs, scale, radius)
        if order < depth or depth >= 32:
            break
        depth *= 2
    if order == 0:
        return 0
    principal = coeffs[depth - order:]
    return numerical_rank(toeplitz_principal(principal), rtol=1e-8)


@dataclass(frozen=True)
class KLFactorization:
    """Left factorization ``s = b_left^{-1} s_left``."""

    b_left: BlaschkeProduct
    s: Evaluator
    kappa: int
    coprimality_certificate: float
    s_left_sup: float
    poles: tuple[tuple[complex, int], ...]
    cancel_radius: float

    def s_left(self, lam: complex) -> np.ndarray:
        """``b_left(lam) s(lam)``; near a cancelled pole the value comes from a
        small-circle mean, which is exact for the (analytic) product."""
        lam = complex(lam)
        for lam0, _ in self.poles:
            if abs(lam - lam0) < self.cancel_radius:
                rho = 2 * self.cancel_radius
                w = np.exp(2j * np.pi * np.arange(64) / 64)
                vals = [self._product(lam + rho * wk) for wk in w]
                return np.mean(vals, axis=0)
        try:
            return self._product(lam)
        except NehariError:
            rho = 2 * self.cancel_radius
            w = np.exp(2j * np.pi * np.arange(64) / 64)
            return np.mean([self._product(lam + rho * wk) for wk in w], axis=0)

    def _product(self, lam):
        return self.b_left.evaluate(lam) @ np.atleast_2d(self.s(lam))


def disk_grid(radii: int = 12, angles: int = 48, r_max: float = 0.99) -> np.ndarray:
    rs = np.linspace(0.0, r_max, radii)
    th = 2 * np.pi * np.arange(angles) / angles
    pts = (rs[1:, None] * np.exp(1j * th)[None, :]).ravel()
    return np.concatenate([[0.0], pts])


def _order_poles(poles):
    return sorted(((complex(l), int(k)) for l, k in poles), key=lambda t: (abs(t[0]), np.angle(t[0])))


def kl_factorize(s: Evaluator, poles_in_disk: Sequence[tuple[complex, int]],
                 circle_points: int = 256, grid: np.ndarray | None = None) -> KLFactorization:
    """Krein-Langer left factorization of a rational generalized Schur function.

    Poles are processed by ascending modulus, then phase. At each step the
    leading Laurent coefficient of the current product ``b s`` is computed and
    a primary factor whose projector spans its dominant left singular vector
    is prepended to ``b``; this lowers the pole multiplicity by one.
    """
    s = _as_matrix_fn(s)
    poles = _order_poles(poles_in_disk)
    for lam0, k in poles:
        if abs(lam0) >= 1:
            raise ValueError(f"pole {lam0} is not inside the disk")
        if k < 0:
            raise ValueError("multiplicities must be nonnegative")
    mus = np.exp(2j * np.pi * np.arange(circle_points) / circle_points)
    sup = max(np.linalg.norm(s(mu), 2) for mu in mus)
    if sup > 1 + 1e-8:
        raise NotSchurOnCircle(f"sup of ||s|| on the circle is {sup:.6g} > 1")

    q = s(_probe_point(poles)).shape[0]
    b = BlaschkeProduct.identity(q)
    radii = {}
    for lam0, mult in poles:
        others = [abs(lam0 - l) for l, _ in poles if l != lam0]
        r = 0.5 * min(others + [1 - abs(lam0)])
        r = max(r, MIN_RADIUS)
        radii[lam0] = r
        for step in range(mult):
            cur = _left_product(b, s)
            scale = _circle_scale(cur, lam0, r)
            coeffs = laurent_coefficients(cur, lam0, mult, r)
            order = _leading_order(coeffs, scale, r)
            if order == 0:
                raise PoleNotCancelled(
                    f"pole at {lam0} vanished after {step} of {mult} listed steps"
                )
            lead = coeffs[mult - order]
            u = np.linalg.svd(lead)[0][:, 0]
            b = b.prepend(BPFactor.from_vector(lam0, u))
        cur = _left_product(b, s)
        scale = _circle_scale(cur, lam0, r)
        coeffs = laurent_coefficients(cur, lam0, max(mult, 1), r)
        if _leading_order(coeffs, scale, r):
            raise PoleNotCancelled(f"b s still has a pole at {lam0} after {mult} factors")

    cancel = 1e-6
    if radii:
        cancel = min(1e-6, 0.25 * min(radii.values()))
    kl = KLFactorization(b, s, b.degree, 0.0, 0.0, tuple(poles), cancel)
    pts = disk_grid() if grid is None else np.asarray(grid, dtype=complex)
    pts = np.concatenate([pts, [lam0 for lam0, _ in poles]])
    cert = np.inf
    s_sup = 0.0
    for lam in pts:
        sl = kl.s_left(lam)
        s_sup = max(s_sup, float(np.linalg.norm(sl, 2)))
        stacked = np.hstack([b.evaluate(lam), sl])
        cert = min(cert, float(np.linalg.svd(stacked, compute_uv=False)[-1]))
    return KLFactorization(b, s, b.degree, cert, s_sup, tuple(poles), cancel)


def _probe_point(poles) -> complex:
    for cand in (0.0, 0.31 + 0.17j, -0.43 + 0.29j, 0.11 - 0.57j):
        if all(abs(cand - l) > 1e-3 for l, _ in poles):
            return cand
    return 0.9j


def _left_product(b: BlaschkeProduct, s: Evaluator) -> Evaluator:
    return lambda lam: b.evaluate(lam) @ s(lam)


def pg_transform(W, p: int, q: int) -> np.ndarray:
    """Potapov-Ginzburg transform ``[[w11, w12], [0, I]] [[I, 0], [w21, w22]]^{-1}``."""
    W = np.asarray(W, dtype=complex)
    if W.shape != (p + q, p + q):
        raise ValueError(f"expected a {(p + q)} x {(p + q)} matrix, got {W.shape}")
    w11, w12, w21, w22 = W[:p, :p], W[:p, p:], W[p:, :p], W[p:, p:]
    cond = np.linalg.cond(w22)
    if not np.isfinite(cond) or cond > 1e12:
        raise BlockSingular(f"w22 is singular (cond={cond:.3e})")
    top = np.block([[w11, w12], [np.zeros((q, p)), np.eye(q)]])
    bottom = np.block([[np.eye(p), np.zeros((p, q))], [w21, w22]])
    return np.linalg.solve(bottom.T, top.T).T


def schur_kernel_gram(s: Evaluator, points: Sequence[complex], directions=None) -> np.ndarray:
    """Gram matrix of ``(I - s(lam) s(omega)^*) / (1 - lam conj(omega))``.

    With ``directions`` (one vector per point) entry ``(k, j)`` is
    ``u_k^* K_{omega_j}(omega_k) u_j``; without, the full block matrix is built.
    """
    s = _as_matrix_fn(s)
    pts = [complex(w) for w in points]
    vals = []
    for w in pts:
        try:
            v = s(w)
        except (NehariError, ZeroDivisionError) as exc:
            raise EvaluationAtPole(f"s cannot be evaluated at {w}") from exc
        if not np.all(np.isfinite(v)):
            raise EvaluationAtPole(f"s is not finite at {w}")
        vals.append(v)
    rows = vals[0].shape[0]
    k = len(pts)
    if directions is None:
        H = np.zeros((k * rows, k * rows), dtype=complex)
        for a in range(k):
            for c in range(k):
                blk = (np.eye(rows) - vals[a] @ ctr(vals[c])) / (1 - pts[a] * np.conj(pts[c]))
                H[a * rows:(a + 1) * rows, c * rows:(c + 1) * rows] = blk
        return hermitian_part(H)
    us = [np.asarray(u, dtype=complex).reshape(-1) for u in directions]
    if len(us) != k:
        raise ValueError("need one direction per point")
    H = np.zeros((k, k), dtype=complex)
    for a in range(k):
        for c in range(k):
            blk = (np.eye(rows) - vals[a] @ ctr(vals[c])) / (1 - pts[a] * np.conj(pts[c]))
            H[a, c] = np.conj(us[a]) @ blk @ us[c]
    return hermitian_part(H)


def kernel_negative_squares(s: Evaluator, points: Sequence[complex], directions=None,
                            rtol: float = 1e-10) -> int:
    """Lower bound for the number of negative squares of the Schur kernel of ``s``.

    This counts negative eigenvalues of one finite Gram matrix, so it can only
    underestimate the true index.
    """
    H = schur_kernel_gram(s, points, directions)
    w = np.linalg.eigvalsh(H)
    tol = rtol * max(1.0, float(np.max(np.abs(w))))
    return int(np.sum(w < -tol))
