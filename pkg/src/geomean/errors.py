"""Exception hierarchy.

Every error raised on purpose by the package derives from ``GeomeanError`` so
the CLI can map domain failures to exit code 1.
"""


class GeomeanError(Exception):
    """Base class for all domain errors."""


class NonHermitian(GeomeanError, ValueError):
    pass


class NotPositiveDefinite(GeomeanError, ValueError):
    pass


class DimensionMismatch(GeomeanError, ValueError):
    pass


class NumericalFailure(GeomeanError, ArithmeticError):
    pass


class InvalidWeight(GeomeanError, ValueError):
    pass


class InvalidParams(GeomeanError, ValueError):
    pass


class PreconditionViolated(GeomeanError, ValueError):
    pass


class InvalidOrder(GeomeanError, ValueError):
    pass


class DegreeOverflow(GeomeanError, RuntimeError):
    pass


class OutOfDomain(GeomeanError, ValueError):
    pass


class NormTooLarge(GeomeanError, ValueError):
    pass


class SparsityViolated(GeomeanError, ValueError):
    pass


class EntryTooLarge(GeomeanError, ValueError):
    pass


class NotUnitary(GeomeanError, ValueError):
    pass


class WeightNormExceeded(GeomeanError, ValueError):
    pass


class PolyUnbounded(GeomeanError, ValueError):
    pass


class ScaleNotOne(GeomeanError, ValueError):
    pass


class DimensionTooLarge(GeomeanError, ValueError):
    pass


class ConditionBoundViolated(GeomeanError, ValueError):
    pass


class BudgetInfeasible(GeomeanError, RuntimeError):
    pass


class InvalidState(GeomeanError, ValueError):
    pass


class InvalidM(GeomeanError, ValueError):
    pass


class InvalidAlpha(GeomeanError, ValueError):
    pass


class InvalidEps(GeomeanError, ValueError):
    pass


class PromiseViolated(GeomeanError, ValueError):
    pass


class GenerationFailed(GeomeanError, RuntimeError):
    pass


class PostSelectionStarved(GeomeanError, RuntimeError):
    pass


class SchemaError(GeomeanError, ValueError):
    """Malformed or incompatible JSON input."""
