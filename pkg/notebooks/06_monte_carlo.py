"""
Seeded Monte Carlo estimates
============================

Large committees on large profiles are out of reach for enumeration; the
sampler draws committees in fixed chunks, each with its own seeded stream, so
the estimate is the same for any thread count.
"""

# %%
from sortition import mc_expected_cost
from sortition.exact_eval import kmaj_expected_cost_exact
from sortition.profiles import iid_issue_profile, single_issue

prof = single_issue(30, 9)
exact = float(kmaj_expected_cost_exact(prof, 3, exact=True).expected_cost)
est = mc_expected_cost(prof, "kmaj", 3, samples=20_000, seed=1)
print(exact, est)

# %%
a = mc_expected_cost(prof, "kmaj", 3, samples=50_000, seed=2, threads=1)
b = mc_expected_cost(prof, "kmaj", 3, samples=50_000, seed=2, threads=4)
print("thread independent:", a == b)

# %%
hits = sum(
    lo <= exact <= hi
    for lo, hi in (mc_expected_cost(prof, "kmaj", 3, samples=2_000, seed=s).ci95 for s in range(50))
)
print(f"exact value inside the 95% interval for {hits}/50 seeds")

# %%
# The weighted rule on a larger random profile.
big = iid_issue_profile(300, 10, 0.45, seed=4)
print(mc_expected_cost(big, "krep", 15, samples=2_000, seed=5))
