"""Quantile point estimators built on order statistics.

Three deterministic estimators are provided:

* the step-function sample quantile ``X_(ceil(n u))``;
* linear interpolation between ``X_(j)`` and ``X_(j+1)`` at plotting position
  ``(n + 1) u`` (valid for ``1/(n+1) < u < n/(n+1)``);
* the same interpolation with logarithmic extrapolation beyond the first and
  last plotting positions, defined on the whole open unit interval.

The fourth, :func:`bootstrap_median_estimate`, is the median of the
semiparametric bootstrap distribution.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import LevelOutsideInterpolableRange, SampleTooSmall
from .rng import RandomSource
from .sample import Sample, _ceil_guarded, check_level

__all__ = [
    "Estimator",
    "PointEstimate",
    "sample_quantile",
    "interpolated_quantile",
    "tail_extrapolated_quantile",
    "bootstrap_median_estimate",
    "sample_quantile_index",
    "interpolable_range",
]

DEFAULT_BOOTSTRAP_SAMPLES = 2000


class Estimator(str, enum.Enum):
    SAMPLE_QUANTILE = "sample_quantile"
    INTERPOLATED = "interpolated"
    TAIL_EXTRAPOLATED = "tail_extrapolated"
    BOOTSTRAP_MEDIAN = "bootstrap_median"


@dataclass(frozen=True)
class PointEstimate:
    value: float
    estimator: Estimator
    level: float


def sample_quantile_index(n: int, u: float) -> int:
    """1-based index ``i`` with ``u`` in ``((i-1)/n, i/n]``."""
    return min(max(_ceil_guarded(n * u), 1), n)


def order_quantile(ordered: np.ndarray, u: float) -> float:
    """Step-rule quantile of an already sorted array."""
    return float(ordered[sample_quantile_index(ordered.size, u) - 1])


def interpolable_range(n: int) -> tuple[float, float]:
    return 1.0 / (n + 1), n / (n + 1)


def _interpolate(ordered: np.ndarray, u):
    # Linear interpolation at plotting position (n+1)u.  Positions that fall
    # on or beyond the first/last order statistic are pinned to it, which is
    # the continuous extension of the estimator to the closed range.
    n = ordered.size
    t = (n + 1) * np.asarray(u, dtype=float)
    j = np.floor(t)
    eps = t - j
    j = j.astype(np.int64)
    below = j < 1
    above = j >= n
    j = np.clip(j, 1, max(n - 1, 1))
    eps = np.where(below, 0.0, np.where(above, 1.0, eps))
    lo = ordered[j - 1]
    hi = ordered[np.minimum(j, n - 1)]
    # (1 - eps) lo + eps hi, written to return lo exactly when eps == 0
    return lo + eps * (hi - lo)


def interpolated_quantile(s: Sample, u: float) -> PointEstimate:
    u = check_level(u, "quantile level")
    low, high = interpolable_range(s.n)
    if not low < u < high:
        raise LevelOutsideInterpolableRange(u, low, high)
    value = float(_interpolate(s.sorted, u))
    return PointEstimate(value, Estimator.INTERPOLATED, u)


def _tail_extrapolate(ordered: np.ndarray, u):
    n = ordered.size
    u = np.asarray(u, dtype=float)
    x1, x2 = ordered[0], ordered[1]
    xn1, xn = ordered[-2], ordered[-1]
    out = np.asarray(_interpolate(ordered, u), dtype=float)
    lower = u <= 1.0 / (n + 1)
    upper = u >= n / (n + 1)
    if np.any(lower):
        out = np.where(lower, x1 + (x2 - x1) * np.log((n + 1) * np.where(lower, u, 1.0)), out)
    if np.any(upper):
        out = np.where(upper, xn - (xn - xn1) * np.log((n + 1) * (1.0 - np.where(upper, u, 0.0))), out)
    return out


def tail_extrapolated_quantile(s: Sample, u: float) -> PointEstimate:
    """Interpolated quantile with logarithmic tail extrapolation.

    Below ``1/(n+1)`` the value is ``X_(1) + (X_(2) - X_(1)) ln((n+1) u)``;
    above ``n/(n+1)`` it mirrors that using ``X_(n-1)`` and ``X_(n)``.  In
    between it coincides with :func:`interpolated_quantile`.
    """
    u = check_level(u, "quantile level")
    if s.n < 2:
        raise SampleTooSmall(s.n, 2)
    return PointEstimate(float(_tail_extrapolate(s.sorted, u)), Estimator.TAIL_EXTRAPOLATED, u)


def sample_quantile(s: Sample, u: float) -> PointEstimate:
    u = check_level(u, "quantile level")
    return PointEstimate(order_quantile(s.sorted, u), Estimator.SAMPLE_QUANTILE, u)


def bootstrap_median_estimate(
    s: Sample,
    u: float,
    B: int = DEFAULT_BOOTSTRAP_SAMPLES,
    src: RandomSource | None = None,
) -> PointEstimate:
    """Median of the semiparametric bootstrap distribution of the ``u``-quantile."""
    from .bootstrap import bootstrap_distribution

    u = check_level(u, "quantile level")
    if B < 1000:
        warnings.warn(f"only {B} bootstrap samples; at least 1000 are recommended", stacklevel=2)
    replicates = np.sort(bootstrap_distribution(s, u, B, src))
    return PointEstimate(order_quantile(replicates, 0.5), Estimator.BOOTSTRAP_MEDIAN, u)


def estimate(s: Sample, u: float, estimator: Estimator | str, **kwargs) -> PointEstimate:
    """Dispatch by estimator name."""
    estimator = Estimator(estimator)
    if estimator is Estimator.SAMPLE_QUANTILE:
        return sample_quantile(s, u)
    if estimator is Estimator.INTERPOLATED:
        return interpolated_quantile(s, u)
    if estimator is Estimator.TAIL_EXTRAPOLATED:
        return tail_extrapolated_quantile(s, u)
    return bootstrap_median_estimate(s, u, **kwargs)

