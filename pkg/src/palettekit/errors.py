"""Exception types shared across the package."""


class PalettekitError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(PalettekitError):
    """An argument violates a documented precondition."""


class DataLoadError(PalettekitError):
    """A data file is missing, malformed, or violates an invariant."""


class MissingEvidenceError(PalettekitError):
    """A required accuracy cell has no (or too few) observations."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class ConstraintError(PalettekitError):
    """Palette constraints are infeasible or violated."""


class ExhaustedAlternativesError(PalettekitError):
    """No feasible replacement remains for a swap request."""


class GenerationFailureError(PalettekitError):
    """Stimulus generation exceeded its resampling budget."""


class CoverageError(PalettekitError):
    """Trial data does not cover the palettes required for validation."""

    def __init__(self, message, missing=None):
        super().__init__(message)
        self.missing = list(missing or [])


class UndefinedCorrelationError(PalettekitError):
    """Correlation is undefined (zero variance input)."""
