"""Validated sample container with cached order statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import EmptySample, IndexOutOfRange, InvalidLevel, NonFiniteValue

__all__ = ["Sample", "make_sample", "order_statistic", "check_level"]


def check_level(u: float, name: str = "level") -> float:
    """Return ``u`` as a float if it lies strictly inside (0, 1)."""
    try:
        u = float(u)
    except (TypeError, ValueError):
        raise InvalidLevel(f"{name} must be a number in (0, 1), got {u!r}") from None
    if not 0.0 < u < 1.0:
        raise InvalidLevel(f"{name} must lie strictly inside (0, 1), got {u!r}")
    return u


@dataclass(frozen=True)
class Sample:
    """An immutable batch of ``n`` finite measurements.

    ``values`` keeps insertion order; ``sorted`` holds the order statistics
    ``X_(1) <= ... <= X_(n)``.  Both arrays are read-only.
    """

    values: np.ndarray
    sorted: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def affine(self, scale: float, shift: float) -> "Sample":
        """The sample ``scale * x + shift``; handy for equivariance checks."""
        return make_sample(scale * self.values + shift)


def make_sample(values: Iterable[float]) -> Sample:
    arr = np.array(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    arr = arr.ravel()
    if arr.size == 0:
        raise EmptySample("a sample needs at least one value")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise NonFiniteValue(i, float(arr[i]))
    ordered = np.sort(arr, kind="stable")
    arr.setflags(write=False)
    ordered.setflags(write=False)
    return Sample(values=arr, sorted=ordered)


def order_statistic(s: Sample, i: int) -> float:
    """The ``i``-th smallest value, 1-based."""
    if isinstance(i, bool) or int(i) != i or not 1 <= i <= s.n:
        raise IndexOutOfRange(f"order statistic index must be in 1..{s.n}, got {i!r}")
    return float(s.sorted[int(i) - 1])


def _ceil_guarded(x: float) -> int:
    # snap to the nearest integer when x is within rounding noise of it
    r = round(x)
    if abs(x - r) <= 1e-12 * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)
