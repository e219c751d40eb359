"""Inner right denominator ``b2`` of ``f0`` and the analytic function ``K = f0 b2``.

With ``W = P^{-1}(I - A)^{-1} B``::

    b2(z)      = I - (1 - z) B^* (I - z A^*)^{-1} W
    b2(z)^{-1} = I + (1 - z) B^* (I - A^*)^{-1} P^{-1} (zI - A)^{-1} B
    (zI - A)^{-1} B b2(z) = P (I - A^*) (I - z A^*)^{-1} W

The last identity gives ``K`` without ever touching the poles of ``f0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._linalg import checked_solve, ctr, frozen
from .realization import Realization
from .stein import GramianPair, cond_checked, gramians


@dataclass(frozen=True)
class DenominatorData:
    realization: Realization
    gramians: GramianPair
    W: np.ndarray          # P^{-1} (I - A)^{-1} B
    Bh_left: np.ndarray    # B^* (I - A^*)^{-1} P^{-1}
    PI_A: np.ndarray       # P (I - A^*)
    cond_P: float

    @classmethod
    def build(cls, r: Realization, g: GramianPair | None = None) -> "DenominatorData":
        if g is None:
            g = gramians(r)
        cond = cond_checked(g.P)
        chol = scipy.linalg.cho_factor(g.P)
        eye = np.eye(r.n)
        W = scipy.linalg.cho_solve(chol, checked_solve(eye - r.A, r.B, "I - A"))
        # B^* (I - A^*)^{-1} P^{-1} = ((P^{-1} (I - A)^{-1} B))^* since P = P^*
        Bh_left = ctr(W)
        return cls(r, g, frozen(W), frozen(Bh_left), frozen(g.P @ (eye - ctr(r.A))), cond)

    @property
    def q(self) -> int:
        return self.realization.q


def b2_evaluate(d: DenominatorData, z: complex, inverse: bool = False) -> np.ndarray:
    """``b2(z)`` or ``b2(z)^{-1}``, each by its own closed form."""
    r = d.realization
    z = complex(z)
    eye = np.eye(r.n)
    if inverse:
        x = checked_solve(z * eye - r.A, r.B, "zI - A")
        return np.eye(r.q) + (1 - z) * d.Bh_left @ x
    x = checked_solve(eye - z * ctr(r.A), d.W, "I - zA^*")
    return np.eye(r.q) - (1 - z) * ctr(r.B) @ x


def b2_evaluate_many(d: DenominatorData, zs) -> np.ndarray:
    r = d.realization
    zs = np.asarray(zs, dtype=complex).ravel()
    m = np.eye(r.n) - zs[:, None, None] * ctr(r.A)
    x = checked_solve(m, np.broadcast_to(d.W, (zs.size,) + d.W.shape), "I - zA^*")
    return np.eye(r.q) - (1 - zs)[:, None, None] * (ctr(r.B) @ x)


def _resolvent_times_b2(d: DenominatorData, z: complex) -> np.ndarray:
    r = d.realization
    x = checked_solve(np.eye(r.n) - complex(z) * ctr(r.A), d.W, "I - zA^*")
    return d.PI_A @ x


def k_evaluate(d: DenominatorData, z: complex) -> np.ndarray:
    """``K(z) = f0(z) b2(z)`` through the pole-cancelled form."""
    return d.realization.C @ _resolvent_times_b2(d, z)


def intertwining_defect(d: DenominatorData, z: complex) -> float:
    """Frobenius distance between ``(zI-A)^{-1} B b2(z)`` computed literally and
    through the cancelled form."""
    r = d.realization
    z = complex(z)
    lhs = checked_solve(z * np.eye(r.n) - r.A, r.B, "zI - A") @ b2_evaluate(d, z)
    return float(np.linalg.norm(lhs - _resolvent_times_b2(d, z)))
