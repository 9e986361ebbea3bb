"""Exception hierarchy shared by every qci module."""

from __future__ import annotations


class QCIError(Exception):
    """Base class for all errors raised by qci."""


class DomainError(QCIError, ValueError):
    """An argument lies outside the mathematical domain of a kernel."""


class EmptySample(QCIError, ValueError):
    pass


class NonFiniteValue(QCIError, ValueError):
    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"non-finite value {value!r} at index {index}")


class IndexOutOfRange(QCIError, IndexError):
    pass


class InvalidLevel(QCIError, ValueError):
    """A quantile or confidence level outside the open unit interval."""


class LevelOutsideInterpolableRange(QCIError, ValueError):
    def __init__(self, level: float, low: float, high: float):
        self.level = level
        self.valid_range = (low, high)
        super().__init__(
            f"level {level!r} outside the interpolable open interval ({low!r}, {high!r})"
        )


class SampleTooSmall(QCIError, ValueError):
    def __init__(self, n: int, required: int):
        self.n = n
        self.required = required
        super().__init__(f"sample size {n} too small, need at least {required}")


class InfeasibleSampleSize(QCIError, ValueError):
    def __init__(self, method: str, n: int, min_n: int, level: float, confidence: float):
        self.method = method
        self.n = n
        self.min_n = min_n
        self.level = level
        self.confidence = confidence
        super().__init__(
            f"{method} interval for the {level!r}-quantile at confidence {confidence!r} "
            f"needs n >= {min_n}, got n = {n}"
        )


class InvalidBounds(QCIError, ValueError):
    pass


class ConfigError(QCIError, ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class DegenerateTrueQuantile(QCIError, ValueError):
    pass


class InputFileError(QCIError, ValueError):
    """Problems reading a run-record CSV, with row/column context in the message."""
