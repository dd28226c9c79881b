"""Exception types raised across the package."""


class SchmidtError(Exception):
    """Base class for all package errors."""


# linear algebra
class NotHermitian(SchmidtError, ValueError):
    pass


class NoConvergence(SchmidtError, RuntimeError):
    pass


class ShapeMismatch(SchmidtError, ValueError):
    pass


class NotCommuting(SchmidtError, ValueError):
    pass


# state model
class ParseError(SchmidtError, ValueError):
    pass


class DimensionMismatch(SchmidtError, ValueError):
    pass


class NotNormalized(SchmidtError, ValueError):
    pass


class WrongArity(SchmidtError, ValueError):
    pass


class BadPartition(SchmidtError, ValueError):
    pass


class BadRank(SchmidtError, ValueError):
    pass


# decomposition criteria
class NotPositivelyCommuting(SchmidtError, ValueError):
    """Raised when a matrix set has no common diagonalizing pair.

    ``pair`` holds the offending slice indices and ``norm`` the commutator
    norm when the failure is a non-commuting Gram pair; both are None when
    the Grams commute but no pair renders every slice diagonal.
    """

    def __init__(self, message, pair=None, norm=None):
        super().__init__(message)
        self.pair = pair
        self.norm = norm


class NotScaledUnitary(SchmidtError, ValueError):
    pass


class NotUnitDecomposable(SchmidtError, ValueError):
    pass


# analysis
class BadGrouping(SchmidtError, ValueError):
    pass


class AncillaTooSmall(SchmidtError, ValueError):
    pass


class NotDensity(SchmidtError, ValueError):
    pass


class NotSamePurification(SchmidtError, ValueError):
    pass


class InstanceTooLarge(SchmidtError, ValueError):
    pass
