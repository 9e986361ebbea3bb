"""How many runs does each interval need?

An exact order-statistic interval for the u-quantile exists only when
``u**n + (1-u)**n <= 1 - level``; the asymptotic interval needs its
fractional indices to land inside ``1..n``.
"""

# %%
from qci import asymptotic_ci_min_n, exact_ci_min_n

levels = (0.90, 0.95, 0.99)
quantiles = (0.01, 0.025, 0.05, 0.1, 0.25, 0.5)

print("exact interval, minimum n")
print("level  " + "".join(f"{u:>7g}" for u in quantiles))
for level in levels:
    print(f"{level:<5g}  " + "".join(f"{exact_ci_min_n(u, level):>7d}" for u in quantiles))

# %%
# The asymptotic interval is hungrier, and lopsided: the upper quantiles
# need fewer runs than their mirror images because the lower index k is
# the binding constraint.
quantiles = (0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95)
print("\nasymptotic interval, minimum n")
print("level  " + "".join(f"{u:>6g}" for u in quantiles))
for level in levels:
    print(f"{level:<5g}  " + "".join(f"{asymptotic_ci_min_n(u, level):>6d}" for u in quantiles))

# %%
# Rule of thumb that falls out of the exact table: with ten runs, stay
# between the 25% and 75% quantiles; tails need dozens of runs.
for n in (10, 25, 50):
    feasible = [u for u in (0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95) if exact_ci_min_n(u, 0.9) <= n]
    print(f"n={n:>2}: exact 90% intervals available for u in {feasible}")
