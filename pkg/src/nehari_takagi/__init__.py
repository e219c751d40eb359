"""Rational matrix Nehari-Takagi problem on the unit disk.

Solvability through the inertia of ``I - PQ``, the generalized
gamma-generating resolvent matrix, and certified sampling of solutions.
"""

from .errors import NehariError
from .nehari import (
    SchurParameter,
    SolutionHandle,
    SolverReport,
    VerifyReport,
    check,
    fourier_coefficients,
    hankel_inertia,
    hankel_rank,
    random_problem,
    sample_solution,
    solve,
    verify_solution,
)
from .realization import Realization, evaluate, markov, random_realization, validate
from .resolvent import GammaGeneratingMatrix, ResolventData, assemble, membership_report
from .stein import GramianPair, gramians, hankel_spectrum, negativity_index, solve_stein

__version__ = "0.1.0"
