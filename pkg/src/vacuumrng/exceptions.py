"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ValidationError -> 1,
CalibrationError -> 2, I/O errors (OSError) -> 3.
"""


class ValidationError(ValueError):
    """An input failed a precondition before any work started."""


class CalibrationError(ValueError):
    """Inputs are numerically valid but physically inconsistent
    (e.g. signal variance not above the dark-noise variance)."""


class InsufficientDataError(ValidationError):
    """A statistic was requested on fewer samples than it needs."""


class BracketingError(RuntimeError):
    """The range optimizer could not bracket a crossing; the model is
    degenerate (e.g. zero quantum variance)."""
