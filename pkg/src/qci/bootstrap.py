"""Semiparametric bootstrap for a single quantile.

Each replicate draws ``n`` uniform quantile levels, pushes them through the
tail-extrapolating quantile function of the observed sample, and records the
step-rule sample quantile of the resulting pseudo-sample.

Because the tail-extrapolating quantile function is nondecreasing, the
``i``-th smallest transformed value equals the transform of the ``i``-th
smallest uniform.  Replicates are therefore computed as
``Q_T(U_(i))`` after a partial sort of each row of uniforms; the uniforms
consumed are exactly the ``B * n`` the literal procedure would consume, row
``b`` belonging to replicate ``b``.
"""

from __future__ import annotations

import numpy as np

from .errors import SampleTooSmall
from .estimators import DEFAULT_BOOTSTRAP_SAMPLES, _tail_extrapolate, sample_quantile_index
from .rng import DEFAULT_SEED, RandomSource, stream_key
from .sample import Sample, check_level

__all__ = ["bootstrap_distribution", "MIN_BOOTSTRAP_SAMPLES"]

MIN_BOOTSTRAP_SAMPLES = 100


def _default_source(label: str) -> RandomSource:
    return RandomSource(DEFAULT_SEED, stream_key(label))


def bootstrap_distribution(
    s: Sample,
    u: float,
    B: int = DEFAULT_BOOTSTRAP_SAMPLES,
    src: RandomSource | None = None,
) -> np.ndarray:
    """Return the ``B`` bootstrap replicates of the ``u``-quantile, in draw order."""
    u = check_level(u, "quantile level")
    if s.n < 2:
        raise SampleTooSmall(s.n, 2)
    if int(B) != B or B < MIN_BOOTSTRAP_SAMPLES:
        raise ValueError(f"need at least {MIN_BOOTSTRAP_SAMPLES} bootstrap samples, got {B!r}")
    if src is None:
        src = _default_source("bootstrap")
    n = s.n
    levels = src.uniforms(int(B) * n).reshape(int(B), n)
    i = sample_quantile_index(n, u)
    picked = np.partition(levels, i - 1, axis=1)[:, i - 1]
    return _tail_extrapolate(s.sorted, picked)
