"""Exception hierarchy.

Every numerical refusal raised by the library derives from
:class:`NehariError`, so callers (the CLI in particular) can catch one type.
"""


class NehariError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(NehariError, ValueError):
    pass


class NotMinimal(NehariError, ValueError):
    pass


class Unstable(NehariError, ValueError):
    pass


class SingularEvaluation(NehariError, ArithmeticError):
    """A matrix that has to be inverted at the requested point is singular."""


class NotConvergent(NehariError, ArithmeticError):
    pass


class IllConditioned(NehariError, ArithmeticError):
    pass


class IndefiniteGramian(NehariError, ArithmeticError):
    pass


class BoundaryDegenerate(NehariError, ArithmeticError):
    """1 is (numerically) an eigenvalue of PQ; the inertia test is undecidable."""


class CrossCheckFailure(NehariError, ArithmeticError):
    pass


class NotOnCircle(NehariError, ValueError):
    pass


class BlockSingular(NehariError, ArithmeticError):
    pass


class GridTooCoarse(NehariError, ValueError):
    pass


class GridSingular(NehariError, ArithmeticError):
    pass


class NotSchurOnCircle(NehariError, ValueError):
    pass


class PoleNotCancelled(NehariError, ArithmeticError):
    pass


class RadiusTooLarge(NehariError, ValueError):
    pass


class EvaluationAtPole(NehariError, ArithmeticError):
    pass


class NotSolvable(NehariError):
    """The requested negative-squares budget is below the negativity index."""


class DenominatorSingularEverywhere(NehariError, ArithmeticError):
    pass


class ProblemFileError(NehariError, ValueError):
    pass
