"""Exception types shared across the package."""


class QExtremesError(Exception):
    """Base class for all package-specific errors."""


class ParameterDomainError(QExtremesError, ValueError):
    """Distribution parameters outside the family's domain."""


class EmptySeriesError(QExtremesError, ValueError):
    """An operation produced or received a series with no observations."""


class InsufficientDataError(QExtremesError, ValueError):
    """Too few observations for the requested operation."""


class DegenerateInputError(QExtremesError, ValueError):
    """Input with no variation where variation is required (e.g. OLS abscissae)."""


class SchemaError(QExtremesError, ValueError):
    """Input file violates the expected schema; message carries row/column context."""


class RankingError(QExtremesError, RuntimeError):
    """Every candidate family failed to fit; no ranking can be produced."""
