"""Closed-form checks on the scalar system ``f0(z) = 1 / (z - 0.5)``.

Hand-derived values: ``P = Q = 4/3``, Hankel singular value ``4/3``,
``kappa1 = 1``, Pick matrix ``-7/12``, ``b2(z) = (z - 0.5)/(1 - 0.5 z)``,
``Lambda^{-1} = [[-12, -9], [-9, -12]] / 7``,
``Afrak(-1) = [[-25, 24], [24, -25]] / 7`` and ``a22`` vanishing at ``34/41``.
"""

from __future__ import annotations

import numpy as np

from .denominator import DenominatorData, b2_evaluate
from .realization import Realization
from .resolvent import GammaGeneratingMatrix, assemble
from .stein import gramians, hankel_spectrum, negativity_index, pick_matrix

TOL = 1e-10


def scalar_system() -> Realization:
    return Realization([[0.5]], [[1.0]], [[1.0]])


def scalar_suite(tol: float = TOL) -> list[tuple[str, bool, float]]:
    """Run every closed-form check; each entry is ``(name, passed, error)``."""
    r = scalar_system()
    g = gramians(r)
    results = []

    def record(name, err):
        results.append((name, bool(err <= tol), float(err)))

    record("P = 4/3", abs(g.P[0, 0] - 4 / 3))
    record("Q = 4/3", abs(g.Q[0, 0] - 4 / 3))
    record("sigma_1 = 4/3", abs(hankel_spectrum(g)[0] - 4 / 3))
    results.append(("kappa1 = 1", negativity_index(g) == 1, 0.0))
    record("P_tilde = -7/12", abs(pick_matrix(r, g).P_tilde[0, 0] + 7 / 12))

    d = DenominatorData.build(r, g)
    zs = 0.9 * np.exp(2j * np.pi * np.arange(8) / 8)
    zs = np.concatenate([zs, np.exp(2j * np.pi * (np.arange(8) + 0.5) / 8)])
    err = max(abs(b2_evaluate(d, z)[0, 0] - (z - 0.5) / (1 - 0.5 * z)) for z in zs)
    record("b2(z) = (z-0.5)/(1-0.5z) at 16 points", err)

    rd = assemble(r, g)
    expected = np.array([[-12.0, -9.0], [-9.0, -12.0]]) / 7
    record("Lambda^-1 entries -12/7, -9/7", float(np.max(np.abs(rd.Lambda_inv - expected))))

    G = GammaGeneratingMatrix(rd)
    expected = np.array([[-25.0, 24.0], [24.0, -25.0]]) / 7
    record("Afrak(-1) = [[-25,24],[24,-25]]/7", float(np.max(np.abs(G.evaluate(-1) - expected))))

    # a22 is affine-over-linear in mu; its zero is the pole of s21
    a22 = G.evaluate(34 / 41)[1, 1]
    record("s21 pole at 34/41", abs(a22))
    return results
