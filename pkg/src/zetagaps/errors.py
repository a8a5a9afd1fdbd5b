"""Exception hierarchy shared by all modules."""


class ZetaLabError(Exception):
    """Base class for every error raised by this package."""


class AccuracyUnreachable(ZetaLabError):
    """The evaluator cannot meet the requested accuracy within its term budget."""


class PoleError(ZetaLabError):
    """Evaluation requested at the pole s = 1."""


class DomainError(ZetaLabError, ValueError):
    """An argument lies outside the supported domain of an operation."""


class ProximityError(ZetaLabError):
    """A point lies too close to a zero or pole of the function being evaluated."""


class NearZeroError(ProximityError):
    """A counting height lies within the exclusion distance of an ordinate."""


class CompletenessError(ZetaLabError):
    """Sign-change scanning could not account for every zero in a window."""


class WindingAmbiguityError(ZetaLabError):
    """A contour passes too close to a zero to fix its winding number."""


class CertificationError(ZetaLabError):
    """A Newton iterate could not be certified as a simple zero inside its box."""


class CoverageError(ZetaLabError):
    """A zero list does not cover the range an operation needs."""


class ConstraintError(ZetaLabError, ValueError):
    """Parameters violate a stated constraint (e.g. N^k <= sqrt(T))."""


class ConsistencyError(ZetaLabError):
    """An internal numerical self-check failed."""


class InsufficientDataError(ZetaLabError):
    """Too few usable data points for a fit."""


class ArchiveError(ZetaLabError):
    """Base class for archive persistence errors."""


class InvariantViolation(ArchiveError):
    """Archive records violate the archive invariants."""


class IntegrityError(ArchiveError):
    """Archive checksum does not match its content."""


class ArchiveParseError(ArchiveError):
    """A line of an archive or external table could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class NonMonotoneError(ArchiveParseError):
    """External ordinates are not strictly increasing."""
