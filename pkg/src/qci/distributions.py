"""Simulation scenarios with exact sampling and known quantiles.

Every draw consumes uniforms from a :class:`~qci.rng.RandomSource` and maps
them through an inverse CDF (one uniform per value; two for the normal
mixture, component choice then position), so replays are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, QCIError
from .intervals import MetricBounds
from .kernels import normal_cdf, normal_quantile, regularized_incomplete_beta
from .rng import RandomSource
from .sample import Sample, check_level, make_sample

__all__ = [
    "ScenarioDistribution",
    "draw",
    "draw_values",
    "from_uniforms",
    "uniforms_per_value",
    "true_quantile",
    "interdecile_range",
    "default_scenarios",
]

KINDS = ("beta", "uniform", "normal", "normal_mixture")


@dataclass(frozen=True)
class ScenarioDistribution:
    """A named simulation distribution.

    ``params`` depends on ``kind``:

    ============== ==========================================
    beta           ``(a, b)``
    uniform        ``(lo, hi)``
    normal         ``(mu, sigma)``
    normal_mixture ``(weights, mus, sigmas)``, tuples of equal length
    ============== ==========================================

    ``bounds`` is the natural range used to clamp bootstrap intervals; it
    defaults to the support for the bounded kinds and to ``None`` otherwise.
    """

    kind: str
    params: tuple
    name: str
    bounds: MetricBounds | None = field(default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError("kind", f"unknown distribution kind {self.kind!r}; expected one of {KINDS}")
        p = self.params
        if self.kind == "beta":
            a, b = p
            if not (a > 0 and b > 0):
                raise ConfigError("params", f"beta shapes must be positive, got {p!r}")
        elif self.kind == "uniform":
            lo, hi = p
            if not lo < hi:
                raise ConfigError("params", f"uniform needs lo < hi, got {p!r}")
        elif self.kind == "normal":
            _, sigma = p
            if not sigma > 0:
                raise ConfigError("params", f"normal sigma must be positive, got {p!r}")
        else:
            weights, mus, sigmas = p
            if not (len(weights) == len(mus) == len(sigmas) >= 1):
                raise ConfigError("params", "mixture weights, mus and sigmas need equal nonzero length")
            if any(w <= 0 for w in weights) or abs(math.fsum(weights) - 1.0) > 1e-12:
                raise ConfigError("params", f"mixture weights must be positive and sum to 1, got {weights!r}")
            if any(s <= 0 for s in sigmas):
                raise ConfigError("params", f"mixture sigmas must be positive, got {sigmas!r}")

    # ---------------------------------------------------------- builders
    @classmethod
    def beta(cls, a: float, b: float, name: str | None = None, bounds="support"):
        return cls._build("beta", (float(a), float(b)), name or f"beta({a:g},{b:g})", bounds)

    @classmethod
    def uniform(cls, lo: float = 0.0, hi: float = 1.0, name: str | None = None, bounds="support"):
        return cls._build("uniform", (float(lo), float(hi)), name or f"uniform({lo:g},{hi:g})", bounds)

    @classmethod
    def normal(cls, mu: float, sigma: float, name: str | None = None, bounds=None):
        return cls._build("normal", (float(mu), float(sigma)), name or f"normal({mu:g},{sigma:g})", bounds)

    @classmethod
    def normal_mixture(cls, weights, mus, sigmas, name: str | None = None, bounds=None):
        params = (tuple(map(float, weights)), tuple(map(float, mus)), tuple(map(float, sigmas)))
        return cls._build("normal_mixture", params, name or "normal_mixture", bounds)

    @classmethod
    def _build(cls, kind, params, name, bounds):
        cls(kind, params, name)  # validate the parameters before deriving bounds
        if isinstance(bounds, str) and bounds == "support":
            lo, hi = (0.0, 1.0) if kind == "beta" else params
            bounds = MetricBounds(lo, hi)
        elif bounds is not None and not isinstance(bounds, MetricBounds):
            bounds = MetricBounds(*bounds)
        return cls(kind, params, name, bounds)

    # ------------------------------------------------------------ shape
    @property
    def mean(self) -> float:
        p = self.params
        if self.kind == "beta":
            return p[0] / (p[0] + p[1])
        if self.kind == "uniform":
            return 0.5 * (p[0] + p[1])
        if self.kind == "normal":
            return p[0]
        weights, mus, _ = p
        return math.fsum(w * m for w, m in zip(weights, mus))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "beta":
            return regularized_incomplete_beta(np.clip(x, 0.0, 1.0), *p)
        if self.kind == "uniform":
            return np.clip((x - p[0]) / (p[1] - p[0]), 0.0, 1.0)
        if self.kind == "normal":
            return normal_cdf((x - p[0]) / p[1])
        weights, mus, sigmas = p
        return sum(w * normal_cdf((x - m) / s) for w, m, s in zip(weights, mus, sigmas))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "beta":
            a, b = p
            inside = (x > 0) & (x < 1)
            xs = np.where(inside, x, 0.5)
            log_pdf = (
                math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + (a - 1) * np.log(xs) + (b - 1) * np.log1p(-xs)
            )
            return np.where(inside, np.exp(log_pdf), 0.0)
        if self.kind == "uniform":
            return np.where((x >= p[0]) & (x <= p[1]), 1.0 / (p[1] - p[0]), 0.0)
        if self.kind == "normal":
            z = (x - p[0]) / p[1]
            return np.exp(-0.5 * z * z) / (p[1] * math.sqrt(2 * math.pi))
        weights, mus, sigmas = p
        return sum(
            w * np.exp(-0.5 * ((x - m) / s) ** 2) / (s * math.sqrt(2 * math.pi))
            for w, m, s in zip(weights, mus, sigmas)
        )

    def ppf(self, u):
        """Inverse CDF, vectorized over ``u`` in (0, 1)."""
        u = np.asarray(u, dtype=float)
        p = self.params
        if self.kind == "uniform":
            return p[0] + (p[1] - p[0]) * u
        if self.kind == "normal":
            return p[0] + p[1] * normal_quantile(u)
        if self.kind == "beta":
            return _beta_ppf(u, *p)
        return _mixture_ppf(self, u)

    _FIELDS = {
        "beta": ("a", "b"),
        "uniform": ("lo", "hi"),
        "normal": ("mu", "sigma"),
        "normal_mixture": ("weights", "mus", "sigmas"),
    }

    @classmethod
    def from_dict(cls, data: dict, path: str = "scenario") -> "ScenarioDistribution":
        """Inverse of :meth:`to_dict`; errors name the offending field."""
        if not isinstance(data, dict):
            raise ConfigError(path, "expected an object")
        kind = data.get("kind")
        if kind not in KINDS:
            raise ConfigError(f"{path}.kind", f"expected one of {KINDS}, got {kind!r}")
        fields = cls._FIELDS[kind]
        unknown = set(data) - set(fields) - {"name", "kind", "bounds"}
        if unknown:
            raise ConfigError(f"{path}.{sorted(unknown)[0]}", f"unknown field for kind {kind!r}")
        args = []
        for key in fields:
            if key not in data:
                raise ConfigError(f"{path}.{key}", "missing")
            value = data[key]
            if kind == "normal_mixture":
                if not isinstance(value, list) or not all(_is_real(v) for v in value):
                    raise ConfigError(f"{path}.{key}", f"expected a list of numbers, got {value!r}")
            elif not _is_real(value):
                raise ConfigError(f"{path}.{key}", f"expected a number, got {value!r}")
            args.append(value)
        name = data.get("name")
        if name is not None and not isinstance(name, str):
            raise ConfigError(f"{path}.name", "expected a string")
        bounds = data.get("bounds", "support" if kind in ("beta", "uniform") else None)
        if bounds not in (None, "support"):
            if not (isinstance(bounds, list) and len(bounds) == 2
                    and all(b is None or _is_real(b) for b in bounds)):
                raise ConfigError(f"{path}.bounds", 'expected [lower, upper] (null for open), "support" or null')
        try:
            return getattr(cls, kind)(*args, name=name, bounds=bounds)
        except ConfigError as exc:
            raise ConfigError(f"{path}.{exc.path}", str(exc).split(": ", 1)[-1]) from None
        except QCIError as exc:
            raise ConfigError(f"{path}.bounds", str(exc)) from None

    def to_dict(self) -> dict:
        out = {"name": self.name, "kind": self.kind}
        p = self.params
        if self.kind == "beta":
            out.update(a=p[0], b=p[1])
        elif self.kind == "uniform":
            out.update(lo=p[0], hi=p[1])
        elif self.kind == "normal":
            out.update(mu=p[0], sigma=p[1])
        else:
            out.update(weights=list(p[0]), mus=list(p[1]), sigmas=list(p[2]))
        out["bounds"] = None if self.bounds is None else [self.bounds.lower, self.bounds.upper]
        return out


def _solve_increasing(f, fprime, target, lo, hi, x, rtol=1e-15, maxiter=200):
    # Vectorized Newton iteration kept inside a shrinking bracket [lo, hi];
    # any step leaving the bracket is replaced by bisection.  Tolerances are
    # relative, so tiny roots and tiny targets are resolved to full precision.
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    x = np.array(x, dtype=float)
    active = np.ones(x.shape, dtype=bool)
    for _ in range(maxiter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xi = x[idx]
        g = f(xi) - target[idx]
        pos = g > 0
        hi[idx] = np.where(pos, xi, hi[idx])
        lo[idx] = np.where(pos, lo[idx], xi)
        d = fprime(xi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = xi - g / d
        ok = np.isfinite(step) & (step > lo[idx]) & (step < hi[idx])
        new = np.where(ok, step, 0.5 * (lo[idx] + hi[idx]))
        scale = rtol * np.abs(xi)
        hit = np.abs(g) <= 0.25 * rtol * target[idx]
        done = hit | (np.abs(new - xi) <= scale) | (hi[idx] - lo[idx] <= scale)
        x[idx] = np.where(hit, xi, new)
        active[idx[done]] = False
    return x


def _beta_start(u: np.ndarray, a: float, b: float) -> np.ndarray:
    # Starting values after the classic rational/normal approximations
    if a >= 1 and b >= 1:
        pp = np.where(u < 0.5, u, 1.0 - u)
        t = np.sqrt(-2.0 * np.log(pp))
        x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t
        x = np.where(u < 0.5, -x, x)
        al = (x * x - 3.0) / 6.0
        h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0))
        w = x * np.sqrt(al + h) / h - (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (
            al + 5.0 / 6.0 - 2.0 / (3.0 * h)
        )
        return a / (a + b * np.exp(2.0 * w))
    lna = math.log(a / (a + b))
    lnb = math.log(b / (a + b))
    t = math.exp(a * lna) / a
    v = math.exp(b * lnb) / b
    w = t + v
    return np.where(u < t / w, (a * w * u) ** (1.0 / a), 1.0 - (b * w * (1.0 - u)) ** (1.0 / b))


def _beta_ppf(u: np.ndarray, a: float, b: float) -> np.ndarray:
    # The upper half is solved on the mirrored law, I_y(b, a) = 1 - u with
    # x = 1 - y, so the target never sits next to 1.
    scalar = u.ndim == 0
    shape = np.shape(u)
    u = np.atleast_1d(u).ravel()
    upper = u > 0.5
    target = np.where(upper, 1.0 - u, u)
    x = np.empty_like(u)
    for mask, p, q in ((~upper, a, b), (upper, b, a)):
        if not mask.any():
            continue
        tgt = target[mask]
        law = ScenarioDistribution.beta(p, q)
        start = np.clip(_beta_start(tgt, p, q), 1e-300, 0.5 if p == q else 1.0 - 1e-16)
        x[mask] = _solve_increasing(
            lambda v: regularized_incomplete_beta(v, p, q),
            law.pdf,
            tgt,
            np.zeros_like(tgt),
            np.ones_like(tgt),
            start,
        )
    x = np.where(upper, 1.0 - x, x)
    return x[0] if scalar else x.reshape(shape)


def _mixture_ppf(dist: ScenarioDistribution, u: np.ndarray) -> np.ndarray:
    # Lower half solves cdf(x) = u, upper half sf(x) = 1 - u.
    scalar = u.ndim == 0
    shape = np.shape(u)
    u = np.atleast_1d(u).ravel()
    weights, mus, sigmas = dist.params
    lo = min(m - 40 * s for m, s in zip(mus, sigmas))
    hi = max(m + 40 * s for m, s in zip(mus, sigmas))

    def sf(v):
        return sum(w * normal_cdf((m - v) / s) for w, m, s in zip(weights, mus, sigmas))

    upper = u > 0.5
    x = np.empty_like(u)
    if (~upper).any():
        tgt = u[~upper]
        x[~upper] = _solve_increasing(
            lambda v: dist.cdf(v), dist.pdf, tgt,
            np.full_like(tgt, lo), np.full_like(tgt, hi), np.full_like(tgt, dist.mean),
        )
    if upper.any():
        tgt = 1.0 - u[upper]
        # in y = -x the survival function is increasing
        y = _solve_increasing(
            lambda v: sf(-v), lambda v: dist.pdf(-v), tgt,
            np.full_like(tgt, -hi), np.full_like(tgt, -lo), np.full_like(tgt, -dist.mean),
        )
        x[upper] = -y
    return x[0] if scalar else x.reshape(shape)


def _is_real(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def uniforms_per_value(dist: ScenarioDistribution) -> int:
    return 2 if dist.kind == "normal_mixture" else 1


def from_uniforms(dist: ScenarioDistribution, levels: np.ndarray) -> np.ndarray:
    """Map uniforms to draws; ``levels`` has a trailing axis of length
    :func:`uniforms_per_value` (component choice first for the mixture)."""
    levels = np.asarray(levels, dtype=float)
    if dist.kind != "normal_mixture":
        return np.asarray(dist.ppf(levels[..., 0]), dtype=float)
    weights, mus, sigmas = dist.params
    edges = np.cumsum(weights)[:-1]
    comp = np.searchsorted(edges, levels[..., 0], side="right")
    z = normal_quantile(levels[..., 1])
    return np.asarray(mus)[comp] + np.asarray(sigmas)[comp] * z


def draw_values(dist: ScenarioDistribution, count: int, src: RandomSource) -> np.ndarray:
    """``count`` i.i.d. values as a plain array."""
    m = uniforms_per_value(dist)
    return from_uniforms(dist, src.uniforms(m * count).reshape(count, m))


def draw(dist: ScenarioDistribution, n: int, src: RandomSource) -> Sample:
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    return make_sample(draw_values(dist, n, src))


def true_quantile(dist: ScenarioDistribution, u: float) -> float:
    u = check_level(u, "quantile level")
    return float(dist.ppf(np.float64(u)))


def interdecile_range(dist: ScenarioDistribution) -> float:
    return true_quantile(dist, 0.9) - true_quantile(dist, 0.1)


def default_scenarios() -> list[ScenarioDistribution]:
    """The six scenario shapes used by the default study configuration."""
    return [
        ScenarioDistribution.beta(2, 8, name="beta_right"),
        ScenarioDistribution.beta(8, 2, name="beta_left"),
        ScenarioDistribution.beta(5, 5, name="beta_symmetric"),
        ScenarioDistribution.uniform(0, 1, name="uniform"),
        ScenarioDistribution.normal(0.5, 0.15, name="normal"),
        ScenarioDistribution.normal_mixture(
            (0.5, 0.5), (0.35, 0.72), (0.08, 0.08), name="normal_mixture"
        ),
    ]
