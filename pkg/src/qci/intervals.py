"""Confidence intervals for quantiles and for the mean.

Four constructions are available:

* exact, distribution-free intervals ``[X_(k), X_(l)]`` whose coverage is a
  binomial sum (equal-tailed, or a randomized mixture of two index pairs
  hitting the nominal level exactly);
* the asymptotic interval with fractional indices from the normal
  approximation, evaluated by linear interpolation;
* the semiparametric bootstrap percentile interval, optionally clamped to
  the natural range of the metric;
* the Student-t interval for the mean.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .bootstrap import _default_source, bootstrap_distribution
from .errors import IndexOutOfRange, InfeasibleSampleSize, InvalidBounds, SampleTooSmall
from .estimators import DEFAULT_BOOTSTRAP_SAMPLES, _interpolate, order_quantile
from .kernels import binomial_pmf, normal_quantile, t_quantile
from .rng import RandomSource
from .sample import Sample, check_level

__all__ = [
    "Method",
    "ExactMode",
    "Randomization",
    "ConfidenceInterval",
    "MetricBounds",
    "exact_coverage",
    "exact_ci_feasible",
    "exact_ci_min_n",
    "exact_ci",
    "asymptotic_indices",
    "asymptotic_ci",
    "asymptotic_ci_min_n",
    "bootstrap_ci",
    "percentile_interval",
    "t_interval",
]


class Method(str, enum.Enum):
    EXACT_RANDOMIZED = "exact_randomized"
    EXACT_EQUAL_TAILED = "exact_equal_tailed"
    ASYMPTOTIC = "asymptotic"
    BOOTSTRAP = "bootstrap"
    T_MEAN = "t_mean"


class ExactMode(str, enum.Enum):
    EQUAL_TAILED = "equal_tailed"
    RANDOMIZED_OPTIMAL = "randomized_optimal"


@dataclass(frozen=True)
class Randomization:
    """Audit record of a randomized exact interval.

    Pair ``a`` is emitted with probability ``lam``; ``draw`` is the uniform
    that decided, ``chosen == "a"`` iff ``draw < lam``.
    """

    pair_a: tuple[int, int]
    pair_b: tuple[int, int]
    coverage_a: float
    coverage_b: float
    lam: float
    draw: float
    chosen: str

    @property
    def mixture_coverage(self) -> float:
        return self.lam * self.coverage_a + (1.0 - self.lam) * self.coverage_b

    @property
    def expected_width(self) -> float:
        """Mixture of index widths ``l - k`` (proportional to expected length under U(0,1))."""
        wa = self.pair_a[1] - self.pair_a[0]
        wb = self.pair_b[1] - self.pair_b[0]
        return self.lam * wa + (1.0 - self.lam) * wb


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    nominal_level: float
    method: Method
    achieved_coverage: float | None = None
    indices: tuple[float, float] | None = None
    randomization: Randomization | None = None
    clipped: bool = False
    note: str | None = None

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class MetricBounds:
    """Natural range of a metric; either side may be open (``None``)."""

    lower: float | None = None
    upper: float | None = None

    def __post_init__(self):
        for side in (self.lower, self.upper):
            if side is not None and not math.isfinite(side):
                raise InvalidBounds(f"bounds must be finite, got {side!r}")
        if self.lower is not None and self.upper is not None and not self.lower < self.upper:
            raise InvalidBounds(f"lower bound {self.lower!r} must be below upper bound {self.upper!r}")

    def clamp(self, lower: float, upper: float) -> tuple[float, float, bool]:
        lo, hi = lower, upper
        if self.lower is not None:
            lo, hi = max(lo, self.lower), max(hi, self.lower)
        if self.upper is not None:
            lo, hi = min(lo, self.upper), min(hi, self.upper)
        return lo, hi, (lo != lower or hi != upper)


def _alpha(level: float) -> float:
    return 1.0 - check_level(level, "confidence level")


# ---------------------------------------------------------------- exact

@functools.lru_cache(maxsize=1024)
def _binomial_table(n: int, u: float) -> tuple[np.ndarray, np.ndarray]:
    # cdf[j] = P(S <= j) and sf[j] = P(S >= j), j = 0..n, S ~ Bin(n, u)
    pmf = np.array([binomial_pmf(s, n, u) for s in range(n + 1)])
    cdf = np.cumsum(pmf)
    sf = np.cumsum(pmf[::-1])[::-1]
    cdf.setflags(write=False)
    sf.setflags(write=False)
    return cdf, sf


def exact_coverage(k: int, l: int, n: int, u: float) -> float:
    """``P(X_(k) <= q_u <= X_(l)) = sum_{s=k}^{l-1} C(n,s) u^s (1-u)^(n-s)``.

    The value does not depend on the sampled distribution.
    """
    u = check_level(u, "quantile level")
    if not (1 <= k < l <= n):
        raise IndexOutOfRange(f"need 1 <= k < l <= n, got k={k}, l={l}, n={n}")
    return math.fsum(binomial_pmf(s, n, u) for s in range(k, l))


def exact_ci_feasible(n: int, u: float, level: float) -> bool:
    u = check_level(u, "quantile level")
    alpha = _alpha(level)
    if n < 2:
        return False
    return u ** n + (1.0 - u) ** n <= alpha


@functools.lru_cache(maxsize=4096)
def exact_ci_min_n(u: float, level: float) -> int:
    """Smallest ``n`` for which an exact two-sided interval exists."""
    u = check_level(u, "quantile level")
    alpha = _alpha(level)
    # max(u, 1-u)^n <= u^n + (1-u)^n gives a lower bound on the answer
    n = max(2, math.ceil(math.log(alpha) / math.log(max(u, 1.0 - u))) - 1)
    while not exact_ci_feasible(n, u, level):
        n += 1
    return n


def _equal_tailed_pair(n: int, u: float, alpha: float) -> tuple[int, int]:
    cdf, sf = _binomial_table(n, u)
    half = alpha / 2.0
    # P(X_(k) > q) = P(S <= k-1);  P(X_(l) < q) = P(S >= l)
    ks = [k for k in range(1, n + 1) if cdf[k - 1] <= half]
    ls = [l for l in range(1, n + 1) if sf[l] <= half]
    if not ks:
        k = 1
        l = min(l for l in range(2, n + 1) if sf[l] <= alpha - cdf[0])
    elif not ls:
        l = n
        k = max(k for k in range(1, n) if cdf[k - 1] <= alpha - sf[n])
    else:
        k, l = max(ks), min(ls)
    return k, l


@functools.lru_cache(maxsize=1024)
def _width_frontier(n: int, u: float) -> tuple[tuple[int, int, float], ...]:
    # For each index width w = l - k, the pair with the largest coverage
    # (ties go to the smallest k).  Coverage grows with w, so every entry is
    # on the width/coverage Pareto frontier.
    cdf, _ = _binomial_table(n, u)
    frontier = []
    for w in range(1, n):
        ks = np.arange(1, n - w + 1)
        cov = cdf[ks + w - 1] - cdf[ks - 1]
        best = int(np.argmax(cov))
        k = int(ks[best])
        frontier.append((k, k + w, exact_coverage(k, k + w, n, u)))
    return tuple(frontier)


@functools.lru_cache(maxsize=1024)
def _randomized_plan(n: int, u: float, level: float):
    """Cheapest two-pair mixture whose coverage equals ``level`` exactly.

    Minimizes ``lam * w_a + (1 - lam) * w_b`` subject to
    ``lam * r_a + (1 - lam) * r_b = level`` over frontier pairs with
    ``r_a <= level <= r_b``.  Returns ``None`` when no pair lies below the
    nominal level.
    """
    frontier = _width_frontier(n, u)
    for k, l, r in frontier:
        if r == level:
            return (k, l, r), (k, l, r), 1.0
    below = [p for p in frontier if p[2] < level]
    above = [p for p in frontier if p[2] > level]
    if not below or not above:
        return None
    best = None
    for a in below:
        for b in above:
            lam = (b[2] - level) / (b[2] - a[2])
            width = lam * (a[1] - a[0]) + (1.0 - lam) * (b[1] - b[0])
            if best is None or width < best[0] - 1e-12:
                best = (width, a, b, lam)
    _, a, b, lam = best
    return a, b, lam


def exact_ci(
    s: Sample,
    u: float,
    level: float,
    mode: ExactMode | str = ExactMode.RANDOMIZED_OPTIMAL,
    src: RandomSource | None = None,
) -> ConfidenceInterval:
    """Exact order-statistic interval for the ``u``-quantile.

    Raises
    ------
    InfeasibleSampleSize
        If ``u**n + (1-u)**n > 1 - level``; carries the minimum ``n``.
    """
    u = check_level(u, "quantile level")
    alpha = _alpha(level)
    mode = ExactMode(mode)
    n = s.n
    if not exact_ci_feasible(n, u, level):
        raise InfeasibleSampleSize("exact", n, exact_ci_min_n(u, level), u, level)
    x = s.sorted

    def equal_tailed(note=None):
        k, l = _equal_tailed_pair(n, u, alpha)
        return ConfidenceInterval(
            lower=float(x[k - 1]),
            upper=float(x[l - 1]),
            nominal_level=level,
            method=Method.EXACT_EQUAL_TAILED,
            achieved_coverage=exact_coverage(k, l, n, u),
            indices=(k, l),
            note=note,
        )

    if mode is ExactMode.EQUAL_TAILED:
        return equal_tailed()

    if src is None:
        src = _default_source("exact_ci")
    draw = src.uniform()
    plan = _randomized_plan(n, u, level)
    if plan is None:
        return equal_tailed(note="no two-pair mixture attains the nominal level; equal-tailed fallback")
    a, b, lam = plan
    chosen = "a" if draw < lam else "b"
    k, l, r = a if chosen == "a" else b
    record = Randomization(
        pair_a=(a[0], a[1]),
        pair_b=(b[0], b[1]),
        coverage_a=a[2],
        coverage_b=b[2],
        lam=lam,
        draw=draw,
        chosen=chosen,
    )
    return ConfidenceInterval(
        lower=float(x[k - 1]),
        upper=float(x[l - 1]),
        nominal_level=level,
        method=Method.EXACT_RANDOMIZED,
        achieved_coverage=r,
        indices=(k, l),
        randomization=record,
    )


# ----------------------------------------------------------- asymptotic

def _asymptotic_pair(n: int, u: float, z: float) -> tuple[float, float]:
    half = z * math.sqrt(u * (1.0 - u) / n)
    return n * (u - half), n * (u + half)


def asymptotic_indices(n: int, u: float, level: float) -> tuple[float, float]:
    """Fractional indices ``k, l = n (u -/+ z sqrt(u (1-u) / n))``."""
    u = check_level(u, "quantile level")
    alpha = _alpha(level)
    return _asymptotic_pair(n, u, normal_quantile(1.0 - alpha / 2.0))


def _asymptotic_valid(n: int, u: float, level: float) -> bool:
    k, l = asymptotic_indices(n, u, level)
    return 1.0 <= k < l <= n


@functools.lru_cache(maxsize=4096)
def asymptotic_ci_min_n(u: float, level: float) -> int:
    u = check_level(u, "quantile level")
    z = normal_quantile(1.0 - _alpha(level) / 2.0)
    n = 1
    while True:
        k, l = _asymptotic_pair(n, u, z)
        if 1.0 <= k < l <= n:
            return n
        n += 1


def asymptotic_ci(s: Sample, u: float, level: float) -> ConfidenceInterval:
    """Asymptotic distribution-free interval.

    Bounds are the interpolated quantile at levels ``k/n`` and ``l/n``.
    Levels at or beyond the last plotting position ``n/(n+1)`` evaluate to
    ``X_(n)``, the continuous limit of the interpolation.
    """
    u = check_level(u, "quantile level")
    n = s.n
    k, l = asymptotic_indices(n, u, level)
    if not 1.0 <= k < l <= n:
        raise InfeasibleSampleSize("asymptotic", n, asymptotic_ci_min_n(u, level), u, level)
    lower = float(_interpolate(s.sorted, k / n))
    upper = float(_interpolate(s.sorted, l / n))
    return ConfidenceInterval(
        lower=lower,
        upper=upper,
        nominal_level=level,
        method=Method.ASYMPTOTIC,
        indices=(k, l),
    )


# ------------------------------------------------------------ bootstrap

def percentile_interval(
    replicates: np.ndarray,
    level: float,
    bounds: MetricBounds | None = None,
    *,
    presorted: bool = False,
) -> ConfidenceInterval:
    """Percentile interval from a bootstrap distribution, using the step-rule quantile."""
    alpha = _alpha(level)
    ordered = replicates if presorted else np.sort(replicates)
    lower = order_quantile(ordered, alpha / 2.0)
    upper = order_quantile(ordered, 1.0 - alpha / 2.0)
    clipped = False
    if bounds is not None:
        lower, upper, clipped = bounds.clamp(lower, upper)
    return ConfidenceInterval(
        lower=lower,
        upper=upper,
        nominal_level=level,
        method=Method.BOOTSTRAP,
        clipped=clipped,
    )


def bootstrap_ci(
    s: Sample,
    u: float,
    level: float,
    B: int = DEFAULT_BOOTSTRAP_SAMPLES,
    bounds: MetricBounds | None = None,
    src: RandomSource | None = None,
) -> ConfidenceInterval:
    """Semiparametric bootstrap percentile interval for the ``u``-quantile."""
    if bounds is not None and not isinstance(bounds, MetricBounds):
        raise InvalidBounds(f"bounds must be MetricBounds, got {type(bounds).__name__}")
    _alpha(level)
    replicates = bootstrap_distribution(s, u, B, src)
    return percentile_interval(replicates, level, bounds)


# ------------------------------------------------------------------- mean

@functools.lru_cache(maxsize=1024)
def _t_critical(level: float, df: int) -> float:
    return t_quantile(1.0 - (1.0 - level) / 2.0, df)


def t_interval(s: Sample, level: float) -> ConfidenceInterval:
    """``mean +/- t_{n-1, 1-alpha/2} S / sqrt(n)`` with ``S`` using divisor ``n - 1``."""
    _alpha(level)
    n = s.n
    if n < 2:
        raise SampleTooSmall(n, 2)
    x = s.values
    # centering on the first value keeps constant samples exact
    shift = float(x[0])
    mean = shift + math.fsum(x - shift) / n
    dev = x - mean
    sd = math.sqrt(math.fsum(dev * dev) / (n - 1))
    half = _t_critical(float(level), n - 1) * sd / math.sqrt(n)
    return ConfidenceInterval(
        lower=mean - half,
        upper=mean + half,
        nominal_level=level,
        method=Method.T_MEAN,
    )
