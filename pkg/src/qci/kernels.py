"""Special-function kernels: binomial, normal, Student-t and incomplete beta.

Everything here is written against the standard library and numpy only.
Inverse CDFs are refined against their forward CDF (Halley/Newton steps with
a bisection safeguard), so the forward functions double as the accuracy
reference.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

__all__ = [
    "binomial_pmf",
    "binomial_cdf",
    "normal_cdf",
    "normal_quantile",
    "t_cdf",
    "t_quantile",
    "regularized_incomplete_beta",
]

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)
_CF_EPS = 1e-15
_CF_TINY = 1e-300
_CF_MAXIT = 20000


def _check_count(name: str, value) -> int:
    if isinstance(value, bool) or int(value) != value or value < 0:
        raise DomainError(f"{name} must be a nonnegative integer, got {value!r}")
    return int(value)


def _check_probability(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability must lie in [0, 1], got {p!r}")
    return float(p)


def binomial_pmf(s: int, n: int, p: float) -> float:
    """Binomial point mass ``C(n, s) p^s (1-p)^(n-s)``, evaluated in log space."""
    s = _check_count("s", s)
    n = _check_count("n", n)
    p = _check_probability(p)
    if s > n:
        raise DomainError(f"s must not exceed n, got s={s}, n={n}")
    # endpoint probabilities have no finite logarithm
    if p == 0.0:
        return 1.0 if s == 0 else 0.0
    if p == 1.0:
        return 1.0 if s == n else 0.0
    log_pmf = (
        math.lgamma(n + 1)
        - math.lgamma(s + 1)
        - math.lgamma(n - s + 1)
        + s * math.log(p)
        + (n - s) * math.log1p(-p)
    )
    return math.exp(log_pmf)


def binomial_cdf(s: int, n: int, p: float) -> float:
    """``P(S <= s)`` for ``S ~ Binomial(n, p)``."""
    s = _check_count("s", s)
    n = _check_count("n", n)
    p = _check_probability(p)
    if s > n:
        raise DomainError(f"s must not exceed n, got s={s}, n={n}")
    if s == n:
        return 1.0
    total = math.fsum(binomial_pmf(j, n, p) for j in range(s + 1))
    return min(total, 1.0)


def normal_cdf(x):
    """Standard normal CDF via ``erfc`` (accurate in both tails)."""
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(-float(x) / _SQRT2)
    x = np.asarray(x, dtype=float)
    return 0.5 * _erfc(-x / _SQRT2).astype(float)


_erfc = np.frompyfunc(math.erfc, 1, 1)

# Acklam's rational approximation, used only as the starting point.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _acklam(p: np.ndarray) -> np.ndarray:
    x = np.empty_like(p)
    low = p < _P_LOW
    high = p > 1.0 - _P_LOW
    mid = ~(low | high)

    q = p[mid] - 0.5
    r = q * q
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    x[mid] = num / den

    for mask, tail, sign in ((low, p[low], 1.0), (high, 1.0 - p[high], -1.0)):
        q = np.sqrt(-2.0 * np.log(tail))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        x[mask] = sign * num / den
    return x


def normal_quantile(p):
    """Inverse standard normal CDF.

    Accepts a scalar or an array.  A rational starting approximation is
    polished with two Halley steps against :func:`normal_cdf`; the result is
    accurate to a few ulps over the whole open interval.
    """
    scalar = np.ndim(p) == 0
    p_arr = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any(~(p_arr > 0.0) | ~(p_arr < 1.0)):
        raise DomainError("normal_quantile requires 0 < p < 1")
    # solve on the lower half and reflect, so the refinement never sees 1 - tiny
    lower = np.minimum(p_arr, 1.0 - p_arr)
    x = _acklam(lower)
    for _ in range(2):
        e = np.asarray(0.5 * _erfc(-x / _SQRT2), dtype=float) - lower
        u = e * _SQRT2PI * np.exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)
    x = np.where(p_arr > 0.5, -x, x)
    x = np.where(p_arr == 0.5, 0.0, x)
    return float(x[0]) if scalar else x


def _betacf(a: float, b: float, x: np.ndarray) -> np.ndarray:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _CF_TINY, _CF_TINY, c)
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _CF_TINY, _CF_TINY, c)
        d = 1.0 / d
        delta = d * c
        h *= delta
        if np.all(np.abs(delta - 1.0) < _CF_EPS):
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b})")


def regularized_incomplete_beta(x, a: float, b: float):
    """Regularized incomplete beta function ``I_x(a, b)``.

    Parameters
    ----------
    x : float or array_like
        Evaluation point(s) in ``[0, 1]``.
    a, b : float
        Positive shape parameters.

    Returns
    -------
    float or ndarray
        Same shape as ``x``.
    """
    if not (a > 0 and b > 0) or not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"shape parameters must be positive and finite, got a={a!r}, b={b!r}")
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(xa >= 0.0) | ~(xa <= 1.0)):
        raise DomainError("x must lie in [0, 1]")
    a = float(a)
    b = float(b)
    out = np.empty_like(xa)
    out[xa == 0.0] = 0.0
    out[xa == 1.0] = 1.0
    inner = (xa > 0.0) & (xa < 1.0)
    if np.any(inner):
        xi = xa[inner]
        log_front = (
            math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
            + a * np.log(xi) + b * np.log1p(-xi)
        )
        front = np.exp(log_front)
        res = np.empty_like(xi)
        direct = xi < (a + 1.0) / (a + b + 2.0)
        if np.any(direct):
            res[direct] = front[direct] * _betacf(a, b, xi[direct]) / a
        flip = ~direct
        if np.any(flip):
            res[flip] = 1.0 - front[flip] * _betacf(b, a, 1.0 - xi[flip]) / b
        out[inner] = np.clip(res, 0.0, 1.0)
    return float(out[0]) if scalar else out


def _check_df(df) -> float:
    if not df >= 1 or not math.isfinite(df):
        raise DomainError(f"degrees of freedom must be >= 1, got {df!r}")
    return float(df)


def _t_upper_tail(t: float, df: float) -> float:
    # P(T > t) for t >= 0, choosing the beta argument that keeps precision
    x2 = t * t
    if x2 < df:
        return 0.5 - 0.5 * regularized_incomplete_beta(x2 / (df + x2), 0.5, 0.5 * df)
    return 0.5 * regularized_incomplete_beta(df / (df + x2), 0.5 * df, 0.5)


def _t_pdf(t: float, df: float) -> float:
    log_norm = (
        math.lgamma(0.5 * (df + 1.0)) - math.lgamma(0.5 * df) - 0.5 * math.log(df * math.pi)
    )
    return math.exp(log_norm - 0.5 * (df + 1.0) * math.log1p(t * t / df))


def t_cdf(t: float, df: float) -> float:
    """Student-t CDF with ``df`` degrees of freedom."""
    df = _check_df(df)
    if t == 0.0:
        return 0.5
    tail = _t_upper_tail(abs(t), df)
    return 1.0 - tail if t > 0 else tail


def t_quantile(p: float, df: float) -> float:
    """Inverse Student-t CDF.

    Solves ``P(T > t) = min(p, 1 - p)`` for ``t >= 0`` with safeguarded Newton
    iterations and reflects by symmetry.
    """
    df = _check_df(df)
    if not 0.0 < p < 1.0:
        raise DomainError(f"t_quantile requires 0 < p < 1, got {p!r}")
    if p == 0.5:
        return 0.0
    tail = min(p, 1.0 - p)
    if df == 1.0:
        guess = math.tan(math.pi * (0.5 - tail))
    elif df == 2.0:
        guess = math.sqrt(2.0 / (4.0 * tail * (1.0 - tail)) - 2.0)
    else:
        guess = -normal_quantile(tail)

    lo, hi = 0.0, max(guess, 1.0)
    while _t_upper_tail(hi, df) > tail:
        lo, hi = hi, 2.0 * hi
    t = min(max(guess, lo), hi)
    for _ in range(200):
        g = _t_upper_tail(t, df) - tail
        if g > 0:
            lo = t
        else:
            hi = t
        step = g / _t_pdf(t, df)
        t_new = t + step
        if not lo < t_new < hi:
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= 1e-15 * max(1.0, t) or hi - lo <= 1e-15 * max(1.0, hi):
            t = t_new
            break
        t = t_new
    return t if p > 0.5 else -t
