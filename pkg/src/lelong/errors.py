"""Exception taxonomy shared by all modules."""


class LelongError(Exception):
    """Base class for all toolkit errors."""


class NotHermitian(LelongError):
    """Input matrix is too far from its conjugate transpose."""


class NotPositiveDefinite(LelongError):
    """Form has an eigenvalue at or below the positive-definiteness floor."""


class DimensionMismatch(LelongError):
    """Operands have incompatible fiber dimensions."""


class OutOfRange(LelongError):
    """Parameter value outside the supported domain of a family or grid."""


class ZeroVector(LelongError):
    """A nonzero fiber or dual vector was required."""


class NonConvergent(LelongError):
    """Tail estimators disagree beyond tolerance; the limit is still drifting."""


class MismatchedFiltration(LelongError):
    """Filtration and family fiber dimensions differ."""


class DomainError(LelongError):
    """Argument outside the analytic domain of a closed-form identity."""


class QuadratureFailure(LelongError):
    """Adaptive quadrature could not reach the requested relative accuracy."""


class TruncationInsufficient(LelongError):
    """Series truncation order too small for the requested tail bound."""


class SchemaError(LelongError):
    """Malformed input file; message carries field context."""
