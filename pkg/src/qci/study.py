"""Monte Carlo studies of interval coverage, interval length and estimator bias.

Randomness is keyed by cell coordinates, never by execution order:

* the ``r``-th simulated sample of size ``n`` from a scenario uses the
  stream ``("sample", scenario, n, r)`` and is shared by every method, level
  and quantile of that scenario and size;
* the bootstrap replicates for run ``r`` at quantile level ``u`` use
  ``("bootstrap", scenario, n, u, r)``, shared by both confidence levels and
  by the bootstrap-median point estimate;
* the randomization draw of the exact interval uses
  ``("exact", scenario, n, u, level, r)``.

Dropping a cell from a configuration therefore leaves every other cell's
numbers unchanged, and results do not depend on the number of workers.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bootstrap import bootstrap_distribution
from .distributions import (
    ScenarioDistribution,
    default_scenarios,
    from_uniforms,
    interdecile_range,
    true_quantile,
    uniforms_per_value,
)
from .errors import ConfigError, DegenerateTrueQuantile, InfeasibleSampleSize, QCIError
from .estimators import (
    DEFAULT_BOOTSTRAP_SAMPLES,
    Estimator,
    bootstrap_median_estimate,
    interpolable_range,
    interpolated_quantile,
    order_quantile,
    sample_quantile,
    tail_extrapolated_quantile,
)
from .intervals import (
    ExactMode,
    Method,
    _asymptotic_valid,
    MetricBounds,
    asymptotic_ci,
    asymptotic_ci_min_n,
    bootstrap_ci,
    exact_ci,
    exact_ci_feasible,
    exact_ci_min_n,
    percentile_interval,
    t_interval,
)
from .rng import DEFAULT_SEED, RandomSource, stream_key
from .sample import Sample, check_level, make_sample

__all__ = [
    "StudyConfig",
    "StudyResult",
    "BiasResult",
    "QuantileRequest",
    "coverage_study",
    "bias_study",
    "analyze_sample",
    "DEFAULT_METHODS",
    "DEFAULT_ESTIMATORS",
]

DEFAULT_SAMPLE_SIZES = (10, 15, 25, 50)
DEFAULT_QUANTILE_LEVELS = (0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95)
DEFAULT_CONFIDENCE_LEVELS = (0.90, 0.95)
DEFAULT_METHODS = (Method.EXACT_RANDOMIZED, Method.ASYMPTOTIC, Method.BOOTSTRAP, Method.T_MEAN)
DEFAULT_ESTIMATORS = (Estimator.SAMPLE_QUANTILE, Estimator.INTERPOLATED, Estimator.BOOTSTRAP_MEDIAN)
DEFAULT_RUNS = 2000
MIN_RUNS = 100


@dataclass(frozen=True)
class StudyConfig:
    scenarios: tuple[ScenarioDistribution, ...] = field(default_factory=lambda: tuple(default_scenarios()))
    sample_sizes: tuple[int, ...] = DEFAULT_SAMPLE_SIZES
    quantile_levels: tuple[float, ...] = DEFAULT_QUANTILE_LEVELS
    confidence_levels: tuple[float, ...] = DEFAULT_CONFIDENCE_LEVELS
    methods: tuple[Method, ...] = DEFAULT_METHODS
    estimators: tuple[Estimator, ...] = DEFAULT_ESTIMATORS
    runs: int = DEFAULT_RUNS
    bootstrap_samples: int = DEFAULT_BOOTSTRAP_SAMPLES
    master_seed: int = DEFAULT_SEED

    _KEYS = (
        "scenarios", "sample_sizes", "quantile_levels", "confidence_levels",
        "methods", "estimators", "runs", "bootstrap_samples", "master_seed",
    )

    @classmethod
    def from_dict(cls, data: dict) -> "StudyConfig":
        """Build a validated config from parsed JSON; every key is optional.

        ``scenarios`` may be the string ``"default"`` or a list of scenario
        objects (see :meth:`ScenarioDistribution.from_dict`).
        """
        if not isinstance(data, dict):
            raise ConfigError("", "configuration must be a JSON object")
        unknown = sorted(set(data) - set(cls._KEYS))
        if unknown:
            raise ConfigError(unknown[0], f"unknown key; expected one of {list(cls._KEYS)}")
        kw = {}
        scen = data.get("scenarios", "default")
        if scen == "default":
            kw["scenarios"] = tuple(default_scenarios())
        elif isinstance(scen, list):
            kw["scenarios"] = tuple(
                ScenarioDistribution.from_dict(d, f"scenarios[{i}]") for i, d in enumerate(scen)
            )
        else:
            raise ConfigError("scenarios", 'expected a list of scenarios or "default"')
        for key in ("sample_sizes", "quantile_levels", "confidence_levels"):
            if key in data:
                value = data[key]
                if not isinstance(value, list):
                    raise ConfigError(key, f"expected a list, got {value!r}")
                for i, v in enumerate(value):
                    if isinstance(v, bool) or not isinstance(v, (int, float)):
                        raise ConfigError(f"{key}[{i}]", f"expected a number, got {v!r}")
                kw[key] = tuple(value)
        for key, enum_cls in (("methods", Method), ("estimators", Estimator)):
            if key in data:
                value = data[key]
                if not isinstance(value, list):
                    raise ConfigError(key, f"expected a list, got {value!r}")
                items = []
                for i, v in enumerate(value):
                    try:
                        items.append(enum_cls(v))
                    except ValueError:
                        choices = [m.value for m in enum_cls]
                        raise ConfigError(f"{key}[{i}]", f"unknown name {v!r}; expected one of {choices}") from None
                kw[key] = tuple(items)
        for key in ("runs", "bootstrap_samples", "master_seed"):
            if key in data:
                v = data[key]
                if isinstance(v, bool) or not isinstance(v, int):
                    raise ConfigError(key, f"expected an integer, got {v!r}")
                kw[key] = v
        return cls(**kw).validate()

    def to_dict(self) -> dict:
        return {
            "scenarios": [s.to_dict() for s in self.scenarios],
            "sample_sizes": list(self.sample_sizes),
            "quantile_levels": list(self.quantile_levels),
            "confidence_levels": list(self.confidence_levels),
            "methods": [m.value for m in self.methods],
            "estimators": [e.value for e in self.estimators],
            "runs": self.runs,
            "bootstrap_samples": self.bootstrap_samples,
            "master_seed": self.master_seed,
        }

    def validate(self) -> "StudyConfig":
        def nonempty(name, seq):
            if len(seq) == 0:
                raise ConfigError(name, "must not be empty")

        for name in ("scenarios", "sample_sizes", "quantile_levels", "confidence_levels", "methods"):
            nonempty(name, getattr(self, name))
        names = [s.name for s in self.scenarios]
        if len(set(names)) != len(names):
            raise ConfigError("scenarios", f"scenario names must be unique, got {names}")
        for i, n in enumerate(self.sample_sizes):
            if isinstance(n, bool) or int(n) != n or n < 2:
                raise ConfigError(f"sample_sizes[{i}]", f"must be an integer >= 2, got {n!r}")
        for name in ("quantile_levels", "confidence_levels"):
            for i, v in enumerate(getattr(self, name)):
                if not isinstance(v, (int, float)) or not 0.0 < v < 1.0:
                    raise ConfigError(f"{name}[{i}]", f"must lie strictly inside (0, 1), got {v!r}")
        if isinstance(self.runs, bool) or int(self.runs) != self.runs or self.runs < MIN_RUNS:
            raise ConfigError("runs", f"must be an integer >= {MIN_RUNS}, got {self.runs!r}")
        if int(self.bootstrap_samples) != self.bootstrap_samples or self.bootstrap_samples < 100:
            raise ConfigError("bootstrap_samples", f"must be an integer >= 100, got {self.bootstrap_samples!r}")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed", "must be an unsigned 64-bit integer")
        return self


@dataclass(frozen=True)
class StudyResult:
    """One aggregated coverage/length cell.

    ``quantile_level`` is the string ``"mean"`` for the t-interval rows.
    Skipped cells carry ``skipped_reason`` (and ``min_n`` when the method
    needs a larger sample) and ``None`` in every statistic.
    """

    scenario: str
    method: str
    quantile_level: float | str
    confidence_level: float
    n: int
    empirical_confidence_level: float | None
    avg_length_normalized: float | None
    avg_length: float | None
    valid_runs: int
    true_value: float | None
    clipped_fraction: float | None = None
    min_lower: float | None = None
    max_upper: float | None = None
    skipped_reason: str | None = None
    min_n: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BiasResult:
    scenario: str
    estimator: str
    quantile_level: float
    n: int
    relative_modulus_bias: float | None
    relative_rmse: float | None
    mean_estimate: float | None
    true_value: float
    runs: int
    skipped_reason: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _scenario_label(dist: ScenarioDistribution):
    return [dist.name, dist.kind, dist.params]


@functools.lru_cache(maxsize=64)
def _simulated_samples(dist: ScenarioDistribution, n: int, runs: int, seed: int) -> tuple[Sample, ...]:
    m = uniforms_per_value(dist)
    label = _scenario_label(dist)
    levels = np.stack([
        RandomSource(seed, stream_key("sample", label, n, r)).uniforms(m * n).reshape(n, m)
        for r in range(runs)
    ])
    values = from_uniforms(dist, levels)
    return tuple(make_sample(row) for row in values)


def _bootstrap_source(seed, dist, n, u, r) -> RandomSource:
    return RandomSource(seed, stream_key("bootstrap", _scenario_label(dist), n, u, r))


def _exact_source(seed, dist, n, u, level, r) -> RandomSource:
    return RandomSource(seed, stream_key("exact", _scenario_label(dist), n, u, level, r))


def _skip(dist, method, u, level, n, reason, min_n=None) -> StudyResult:
    return StudyResult(
        scenario=dist.name,
        method=method.value,
        quantile_level=u,
        confidence_level=level,
        n=n,
        empirical_confidence_level=None,
        avg_length_normalized=None,
        avg_length=None,
        valid_runs=0,
        true_value=None,
        skipped_reason=reason,
        min_n=min_n,
    )


def _aggregate(dist, method, u, level, n, lowers, uppers, truth, idr, clipped=None) -> StudyResult:
    lowers = np.asarray(lowers, dtype=float)
    uppers = np.asarray(uppers, dtype=float)
    hits = (lowers <= truth) & (truth <= uppers)
    lengths = uppers - lowers
    avg = math.fsum(lengths) / lengths.size
    return StudyResult(
        scenario=dist.name,
        method=method.value,
        quantile_level=u,
        confidence_level=level,
        n=n,
        empirical_confidence_level=float(np.count_nonzero(hits)) / hits.size,
        avg_length_normalized=avg / idr,
        avg_length=avg,
        valid_runs=int(hits.size),
        true_value=truth,
        clipped_fraction=None if clipped is None else float(np.mean(clipped)),
        min_lower=float(lowers.min()),
        max_upper=float(uppers.max()),
    )


def _coverage_unit(cfg: StudyConfig, dist: ScenarioDistribution, n: int, u) -> list[StudyResult]:
    samples = _simulated_samples(dist, n, cfg.runs, cfg.master_seed)
    idr = interdecile_range(dist)
    seed = cfg.master_seed
    rows: list[StudyResult] = []

    if u == "mean":
        truth = dist.mean
        for level in cfg.confidence_levels:
            cis = [t_interval(s, level) for s in samples]
            rows.append(_aggregate(dist, Method.T_MEAN, "mean", level, n,
                                   [c.lower for c in cis], [c.upper for c in cis], truth, idr))
        return rows

    truth = true_quantile(dist, u)
    boot_sorted = None
    for method in cfg.methods:
        if method is Method.T_MEAN:
            continue
        for level in cfg.confidence_levels:
            if method in (Method.EXACT_RANDOMIZED, Method.EXACT_EQUAL_TAILED):
                if not exact_ci_feasible(n, u, level):
                    min_n = exact_ci_min_n(u, level)
                    rows.append(_skip(dist, method, u, level, n, f"exact interval needs n >= {min_n}", min_n))
                    continue
                mode = (ExactMode.RANDOMIZED_OPTIMAL if method is Method.EXACT_RANDOMIZED
                        else ExactMode.EQUAL_TAILED)
                cis = [exact_ci(s, u, level, mode, _exact_source(seed, dist, n, u, level, r))
                       for r, s in enumerate(samples)]
            elif method is Method.ASYMPTOTIC:
                if not _asymptotic_valid(n, u, level):
                    min_n = asymptotic_ci_min_n(u, level)
                    rows.append(_skip(dist, method, u, level, n, f"asymptotic interval needs n >= {min_n}", min_n))
                    continue
                cis = [asymptotic_ci(s, u, level) for s in samples]
            else:
                if boot_sorted is None:
                    boot_sorted = [
                        np.sort(bootstrap_distribution(s, u, cfg.bootstrap_samples,
                                                       _bootstrap_source(seed, dist, n, u, r)))
                        for r, s in enumerate(samples)
                    ]
                cis = [percentile_interval(b, level, dist.bounds, presorted=True) for b in boot_sorted]
                rows.append(_aggregate(dist, method, u, level, n, [c.lower for c in cis],
                                       [c.upper for c in cis], truth, idr, [c.clipped for c in cis]))
                continue
            rows.append(_aggregate(dist, method, u, level, n, [c.lower for c in cis],
                                   [c.upper for c in cis], truth, idr))
    return rows


def _bias_unit(cfg: StudyConfig, dist: ScenarioDistribution, n: int, u: float) -> list[BiasResult]:
    samples = _simulated_samples(dist, n, cfg.runs, cfg.master_seed)
    truth = true_quantile(dist, u)
    if abs(truth) < 1e-9:
        raise DegenerateTrueQuantile(
            f"true {u}-quantile of {dist.name} is {truth!r}; relative bias is undefined"
        )
    rows = []
    for est in cfg.estimators:
        if est is Estimator.INTERPOLATED:
            low, high = interpolable_range(n)
            if not low < u < high:
                rows.append(BiasResult(dist.name, est.value, u, n, None, None, None, truth, 0,
                                       f"level outside interpolable range ({low:.6g}, {high:.6g})"))
                continue
            values = [interpolated_quantile(s, u).value for s in samples]
        elif est is Estimator.SAMPLE_QUANTILE:
            values = [sample_quantile(s, u).value for s in samples]
        elif est is Estimator.TAIL_EXTRAPOLATED:
            values = [tail_extrapolated_quantile(s, u).value for s in samples]
        else:
            values = [
                order_quantile(np.sort(bootstrap_distribution(
                    s, u, cfg.bootstrap_samples, _bootstrap_source(cfg.master_seed, dist, n, u, r))), 0.5)
                for r, s in enumerate(samples)
            ]
        err = np.asarray(values) - truth
        rows.append(BiasResult(
            scenario=dist.name,
            estimator=est.value,
            quantile_level=u,
            n=n,
            relative_modulus_bias=abs(math.fsum(err) / err.size) / abs(truth),
            relative_rmse=math.sqrt(math.fsum(err * err) / err.size) / abs(truth),
            mean_estimate=math.fsum(values) / len(values),
            true_value=truth,
            runs=len(values),
        ))
    return rows


def _run_units(fn, cfg, units, jobs):
    if jobs is None or jobs <= 1 or len(units) <= 1:
        parts = [fn(cfg, *unit) for unit in units]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(fn, [cfg] * len(units), *zip(*units)))
    return [row for part in parts for row in part]


def coverage_study(cfg: StudyConfig, jobs: int = 1) -> list[StudyResult]:
    """Empirical confidence level and normalized length for every configured cell.

    Rows are ordered by scenario, sample size, quantile level (``"mean"``
    last), method and confidence level, whatever ``jobs`` is.
    """
    cfg.validate()
    quantile_methods = [m for m in cfg.methods if m is not Method.T_MEAN]
    units = []
    for dist in cfg.scenarios:
        for n in cfg.sample_sizes:
            if quantile_methods:
                units.extend((dist, n, u) for u in cfg.quantile_levels)
            if Method.T_MEAN in cfg.methods:
                units.append((dist, n, "mean"))
    return _run_units(_coverage_unit, cfg, units, jobs)


def bias_study(cfg: StudyConfig, jobs: int = 1) -> list[BiasResult]:
    """Relative bias and RMSE of the point estimators, normalized by the true quantile."""
    cfg.validate()
    if not cfg.estimators:
        raise ConfigError("estimators", "must not be empty")
    units = [(dist, n, u) for dist in cfg.scenarios for n in cfg.sample_sizes for u in cfg.quantile_levels]
    return _run_units(_bias_unit, cfg, units, jobs)


# --------------------------------------------------------------- analysis

@dataclass(frozen=True)
class QuantileRequest:
    quantile_level: float
    confidence_level: float = 0.90
    methods: tuple[Method, ...] = DEFAULT_METHODS
    bounds: MetricBounds | None = None


def _error_record(exc: Exception) -> dict:
    rec = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, InfeasibleSampleSize):
        rec["min_n"] = exc.min_n
    return rec


def _interval_record(ci) -> dict:
    rec = {
        "method": ci.method.value,
        "lower": ci.lower,
        "upper": ci.upper,
        "nominal_level": ci.nominal_level,
        "achieved_coverage": ci.achieved_coverage,
        "indices": None if ci.indices is None else list(ci.indices),
        "clipped": ci.clipped,
        "note": ci.note,
        "randomization": None,
    }
    if ci.randomization is not None:
        rz = ci.randomization
        rec["randomization"] = {
            "pair_a": list(rz.pair_a),
            "pair_b": list(rz.pair_b),
            "coverage_a": rz.coverage_a,
            "coverage_b": rz.coverage_b,
            "lambda": rz.lam,
            "draw": rz.draw,
            "chosen": rz.chosen,
        }
    return rec


def analyze_sample(
    s: Sample,
    requests: list[QuantileRequest],
    *,
    seed: int = DEFAULT_SEED,
    bootstrap_samples: int = DEFAULT_BOOTSTRAP_SAMPLES,
) -> dict:
    """Point estimates and intervals for each request, as a JSON-ready dict.

    Estimator failures are recorded next to the offending entry; they never
    abort the report.
    """
    if not requests:
        raise ValueError("at least one quantile request is required")
    entries = []
    for req in requests:
        u = check_level(req.quantile_level, "quantile level")
        level = check_level(req.confidence_level, "confidence level")

        def boot_src():
            return RandomSource(seed, stream_key("estimate", "bootstrap", u))

        points = []
        for est in (Estimator.SAMPLE_QUANTILE, Estimator.INTERPOLATED,
                    Estimator.TAIL_EXTRAPOLATED, Estimator.BOOTSTRAP_MEDIAN):
            try:
                if est is Estimator.SAMPLE_QUANTILE:
                    pe = sample_quantile(s, u)
                elif est is Estimator.INTERPOLATED:
                    pe = interpolated_quantile(s, u)
                elif est is Estimator.TAIL_EXTRAPOLATED:
                    pe = tail_extrapolated_quantile(s, u)
                else:
                    pe = bootstrap_median_estimate(s, u, bootstrap_samples, boot_src())
                points.append({"estimator": est.value, "value": pe.value})
            except QCIError as exc:
                points.append({"estimator": est.value, "value": None, "error": _error_record(exc)})

        intervals = []
        for method in req.methods:
            method = Method(method)
            try:
                if method is Method.EXACT_RANDOMIZED:
                    ci = exact_ci(s, u, level, ExactMode.RANDOMIZED_OPTIMAL,
                                  RandomSource(seed, stream_key("estimate", "exact", u, level)))
                elif method is Method.EXACT_EQUAL_TAILED:
                    ci = exact_ci(s, u, level, ExactMode.EQUAL_TAILED)
                elif method is Method.ASYMPTOTIC:
                    ci = asymptotic_ci(s, u, level)
                elif method is Method.BOOTSTRAP:
                    ci = bootstrap_ci(s, u, level, bootstrap_samples, req.bounds, boot_src())
                else:
                    ci = t_interval(s, level)
                intervals.append(_interval_record(ci))
            except QCIError as exc:
                intervals.append({"method": method.value, "error": _error_record(exc)})

        entries.append({
            "quantile_level": u,
            "confidence_level": level,
            "bounds": None if req.bounds is None else [req.bounds.lower, req.bounds.upper],
            "point_estimates": points,
            "intervals": intervals,
        })
    return {
        "n": s.n,
        "seed": seed,
        "bootstrap_samples": bootstrap_samples,
        "sample": {
            "min": float(s.sorted[0]),
            "max": float(s.sorted[-1]),
            "mean": float(math.fsum(s.values) / s.n),
        },
        "requests": entries,
    }
