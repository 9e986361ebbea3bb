"""A reduced coverage study.

The full design (six scenarios, R = 2000, B = 2000) is available through
``qci simulate --config configs/default.json``; here we run one scenario
with fewer repetitions to see the shape of the results in a few seconds.
"""

# %%
from qci import Method, ScenarioDistribution, StudyConfig, coverage_study

cfg = StudyConfig(
    scenarios=(ScenarioDistribution.normal_mixture((0.5, 0.5), (0.35, 0.72), (0.08, 0.08), name="bimodal"),),
    sample_sizes=(10, 25, 50),
    quantile_levels=(0.1, 0.5, 0.9),
    confidence_levels=(0.90,),
    runs=300,
    bootstrap_samples=300,
)
rows = coverage_study(cfg)

# %%
print(f"{'method':<18}{'u':>6}{'n':>5}{'coverage':>10}{'length/IDR':>12}")
for r in rows:
    if r.skipped_reason:
        print(f"{r.method:<18}{r.quantile_level!s:>6}{r.n:>5}   skipped: {r.skipped_reason}")
    else:
        print(f"{r.method:<18}{r.quantile_level!s:>6}{r.n:>5}{r.empirical_confidence_level:>10.3f}"
              f"{r.avg_length_normalized:>12.3f}")

# %%
# Lengths shrink with n; the bootstrap is the only method that answers at
# the tails with ten runs, and there it tends to under-cover.
boot = {(r.quantile_level, r.n): r for r in rows if r.method == Method.BOOTSTRAP.value}
print("\nbootstrap coverage at u=0.1:", {n: round(boot[(0.1, n)].empirical_confidence_level, 3) for n in (10, 25, 50)})
