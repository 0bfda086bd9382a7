"""Exception types shared across the package."""

from __future__ import annotations


class DimwatchError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(DimwatchError):
    """A configuration key is unknown or its value is out of range."""


class SchemaError(DimwatchError):
    """Input data does not match the declared column schema."""


class ParseError(DimwatchError):
    """A text input could not be parsed.

    ``failures`` holds ``(line, reason)`` pairs, 1-based physical line
    numbers with the header counting as line 1.
    """

    def __init__(self, message: str, failures: list[tuple[int, str]] | None = None):
        super().__init__(message)
        self.failures = list(failures or [])


class ContractError(DimwatchError):
    """A caller violated an operation's precondition."""


class InsufficientDataError(DimwatchError):
    """Too few observations for the requested operation."""


class DegenerateDataError(DimwatchError):
    """The data carries no usable variability."""


class NumericError(DimwatchError):
    """A numeric routine failed to converge; carries the residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class TrainingError(DimwatchError):
    """The training pipeline cannot produce a valid model."""


class NonSeparableDataError(TrainingError):
    """Sequential covering exhausted its recursion budget.

    Carries the best rule seen so far and its empirical risk so callers
    can still fall back on it.
    """

    def __init__(self, message: str, best_rule=None, best_risk: float | None = None):
        super().__init__(message)
        self.best_rule = best_rule
        self.best_risk = best_risk


class AlignmentError(DimwatchError):
    """Two data sets that must cover the same observations do not."""


class FormatVersionError(DimwatchError):
    """A persisted artifact uses an unsupported format version."""

    def __init__(self, message: str, found=None, supported=None):
        super().__init__(message)
        self.found = found
        self.supported = supported


class IntegrityError(DimwatchError):
    """A persisted artifact is truncated or failed its checksum."""


class ScriptError(DimwatchError):
    """A simulation event script references unknown nodes or rounds."""


class IncompleteMessageError(DimwatchError):
    """Fragment reassembly is missing fragments; names the missing indices."""

    def __init__(self, message: str, missing: list[int] | None = None):
        super().__init__(message)
        self.missing = list(missing or [])
