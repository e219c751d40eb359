"""Fourier coefficients on the unit circle and block-Hankel matrices.

The coefficient convention is ``gamma_k(f) = (1/2pi) int e^{ik theta} f(e^{i theta}) d theta``
for ``k >= 1``, i.e. the coefficient of ``z^{-k}``. For ``f0 = C (zI - A)^{-1} B``
this is the Markov coefficient ``C A^{k-1} B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._linalg import unit_circle
from .errors import GridSingular, NehariError

RADIAL_SHRINK = 1e-9


@dataclass(frozen=True)
class FourierSeries:
    """Discrete Fourier coefficients ``gamma_1 .. gamma_K`` of a circle function.

    ``tail`` is the largest coefficient norm among indices ``K+1 .. N/2``; it
    bounds what has been left out and, for rational data, the aliasing error.
    ``perturbed`` lists grid angles moved radially inward to avoid a singularity.
    """

    coeffs: np.ndarray
    grid: int
    tail: float
    perturbed: tuple[float, ...] = ()


def sample_circle(f: Callable[[complex], np.ndarray], points: np.ndarray,
                  many: Callable[[np.ndarray], np.ndarray] | None = None):
    """Evaluate ``f`` at ``points``; singular points are retried at ``(1 - 1e-9) mu``.

    Returns the stacked values and the indices that were perturbed.
    """
    if many is not None:
        try:
            return np.asarray(many(points)), []
        except NehariError:
            pass
    values = []
    moved = []
    for i, mu in enumerate(points):
        try:
            v = f(mu)
        except NehariError:
            try:
                v = f((1.0 - RADIAL_SHRINK) * mu)
            except NehariError as exc:
                raise GridSingular(f"cannot evaluate near mu={mu}: {exc}") from exc
            moved.append(i)
        values.append(np.atleast_2d(np.asarray(v, dtype=complex)))
    return np.stack(values), moved


def fourier_coefficients(f, N: int = 1024, K: int = 48) -> FourierSeries:
    """Coefficients ``gamma_1 .. gamma_K`` from ``N`` uniform samples via FFT.

    ``f`` is either a callable ``mu -> matrix`` or an object exposing
    ``evaluate`` (and optionally ``evaluate_many``), such as a solution handle.
    """
    if N < 4 or N & (N - 1):
        raise ValueError(f"grid size must be a power of two, got {N}")
    if N < 4 * K:
        raise ValueError(f"grid size {N} too small for {K} coefficients (need N >= 4K)")
    if hasattr(f, "evaluate"):
        single, many = f.evaluate, getattr(f, "evaluate_many", None)
    else:
        single, many = f, None
    mus = unit_circle(N)
    values, moved = sample_circle(single, mus, many)
    # gamma_k = (1/N) sum_l f(mu_l) mu_l^k, which is numpy's inverse FFT
    spectrum = np.fft.ifft(values, axis=0)
    coeffs = spectrum[1:K + 1]
    tail_block = spectrum[K + 1:N // 2]
    tail = float(np.max(np.linalg.norm(tail_block, axis=(1, 2)))) if len(tail_block) else 0.0
    angles = tuple(float(2 * np.pi * i / N) for i in moved)
    return FourierSeries(coeffs, N, tail, angles)


@dataclass(frozen=True)
class HankelMatrix:
    """Block-Hankel matrix with block ``(j, k) = gamma_{j+k-1}`` (1-based)."""

    coeffs: np.ndarray
    rows: int
    cols: int

    @classmethod
    def from_coefficients(cls, coeffs, rows: int | None = None, cols: int | None = None):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim == 1:
            coeffs = coeffs[:, None, None]
        count = coeffs.shape[0]
        if rows is None and cols is None:
            rows = (count + 1) // 2
            cols = count + 1 - rows
        elif cols is None:
            cols = count + 1 - rows
        elif rows is None:
            rows = count + 1 - cols
        if rows + cols - 1 > count or rows < 1 or cols < 1:
            raise ValueError(f"{count} coefficients cannot fill a {rows} x {cols} block Hankel")
        return cls(coeffs, rows, cols)

    @property
    def array(self) -> np.ndarray:
        _, p, q = self.coeffs.shape
        idx = np.arange(self.rows)[:, None] + np.arange(self.cols)[None, :]
        blocks = self.coeffs[idx]  # (rows, cols, p, q)
        return blocks.transpose(0, 2, 1, 3).reshape(self.rows * p, self.cols * q)

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.array, compute_uv=False)


def hankel_rank(coeffs, rel_tol: float = 1e-6, scale: float | None = None) -> int:
    """Numerical rank of the block-Hankel matrix built from ``coeffs``.

    Singular values count when they exceed ``rel_tol * max(sigma_1, scale)``.
    Pass ``scale`` when the sequence is a difference of two others, so that
    cancellation noise is judged against the size of the inputs.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape[0] == 0:
        raise ValueError("empty coefficient list")
    s = HankelMatrix.from_coefficients(coeffs).singular_values()
    ref = max(float(s[0]) if s.size else 0.0, scale or 0.0)
    if ref <= np.finfo(float).tiny:
        return 0
    return int(np.sum(s > rel_tol * ref))
