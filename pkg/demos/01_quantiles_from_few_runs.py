"""Quantiles of a training metric from a handful of seeded runs.

Run with ``python demos/01_quantiles_from_few_runs.py``.
"""

# %%
# Suppose 25 training runs, each with a different seed, produced these test
# accuracies.  We fake them with a left-skewed Beta law so the true
# quantiles are known.
import numpy as np

from qci import (
    MetricBounds,
    RandomSource,
    ScenarioDistribution,
    asymptotic_ci,
    bootstrap_ci,
    draw,
    exact_ci,
    interpolated_quantile,
    sample_quantile,
    t_interval,
    true_quantile,
)
from qci.estimators import bootstrap_median_estimate

law = ScenarioDistribution.beta(8, 2)
runs = draw(law, 25, RandomSource(2024, 1))
print("accuracies:", np.round(runs.sorted, 3))

# %%
# Point estimates of the 10% quantile (a "bad but plausible" run).
u = 0.10
print(f"\ntrue {u:.0%} quantile      {true_quantile(law, u):.4f}")
print(f"step-rule estimate      {sample_quantile(runs, u).value:.4f}")
print(f"interpolated estimate   {interpolated_quantile(runs, u).value:.4f}")
print(f"bootstrap median        {bootstrap_median_estimate(runs, u, 2000, RandomSource(2024, 2)).value:.4f}")

# %%
# Interval estimates at 90% confidence.  The exact interval needs n >= 22
# for this level, so 25 runs are just enough; the asymptotic one needs 42.
level = 0.90
ci = exact_ci(runs, u, level, src=RandomSource(2024, 3))
print(f"\nexact (randomized)   [{ci.lower:.4f}, {ci.upper:.4f}]  "
      f"order statistics {ci.indices}, exact coverage {ci.achieved_coverage:.4f}")
rz = ci.randomization
print(f"  mixture of {rz.pair_a} and {rz.pair_b} with weight {rz.lam:.3f}; draw {rz.draw:.3f} chose '{rz.chosen}'")

try:
    asymptotic_ci(runs, u, level)
except ValueError as exc:
    print(f"asymptotic           unavailable: {exc}")

boot = bootstrap_ci(runs, u, level, 2000, MetricBounds(0.0, 1.0), RandomSource(2024, 4))
print(f"bootstrap            [{boot.lower:.4f}, {boot.upper:.4f}]  clipped={boot.clipped}")

# %%
# For contrast, the t-interval answers a different question: where is the
# mean accuracy?  It says nothing about how bad a single run can be.
mean_ci = t_interval(runs, level)
print(f"t-interval for mean  [{mean_ci.lower:.4f}, {mean_ci.upper:.4f}]  (true mean {law.mean:.4f})")
