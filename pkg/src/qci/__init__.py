"""Nonparametric quantile estimation and confidence intervals for small samples."""

__version__ = "0.1.0"

from .distributions import ScenarioDistribution, default_scenarios, draw, true_quantile
from .errors import (
    ConfigError,
    DegenerateTrueQuantile,
    DomainError,
    EmptySample,
    IndexOutOfRange,
    InfeasibleSampleSize,
    InputFileError,
    InvalidBounds,
    InvalidLevel,
    LevelOutsideInterpolableRange,
    NonFiniteValue,
    QCIError,
    SampleTooSmall,
)
from .estimators import (
    Estimator,
    PointEstimate,
    bootstrap_median_estimate,
    estimate,
    interpolated_quantile,
    sample_quantile,
    tail_extrapolated_quantile,
)
from .intervals import (
    ConfidenceInterval,
    ExactMode,
    Method,
    MetricBounds,
    Randomization,
    asymptotic_ci,
    asymptotic_ci_min_n,
    bootstrap_ci,
    exact_ci,
    exact_ci_feasible,
    exact_ci_min_n,
    exact_coverage,
    t_interval,
)
from .rng import DEFAULT_SEED, RandomSource
from .sample import Sample, make_sample, order_statistic
from .study import (
    BiasResult,
    QuantileRequest,
    StudyConfig,
    StudyResult,
    analyze_sample,
    bias_study,
    coverage_study,
)
