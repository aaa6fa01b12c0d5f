"""
Profiles, social cost and the majority optimum
==============================================

A profile is an ``n x m`` 0/1 matrix: row ``i`` is voter ``i``'s preferred
outcome on each of ``m`` binary issues.  A voter's cost for an outcome vector
is its Hamming distance to it, and the social cost sums over voters.
"""

# %%
import numpy as np

from sortition import PreferenceProfile, cost_ratio, optimal_cost, optimal_outcome, social_cost
from sortition.profiles import equidistant_profile, iid_issue_profile, single_issue

prof = PreferenceProfile([[1, 0, 1], [1, 1, 0], [0, 0, 0], [1, 0, 0]])
print("support per issue:", prof.support())

# %%
# The issue-wise majority minimizes social cost; with an even split any
# choice costs the same on that issue.
z, best = optimal_outcome(prof)
print("optimal outcome:", z, "cost:", social_cost(prof, z), "=", best, "=", optimal_cost(prof))
print("all-ones outcome costs", social_cost(prof, np.ones(3, dtype=int)))

# %%
# Ratios follow 0/0 = 1 and positive/0 = inf.
print(cost_ratio(3, 3).value, cost_ratio(0, 0).value, cost_ratio(2, 0).to_dict())

# %%
# One issue with n1 supporters of alternative 1.
print(single_issue(10, 3).bits.ravel())

# %%
# The permutation construction: every pair of voters sits at the same distance.
eq = equidistant_profile(4, 1)
d = (eq.bits[:, None, :] != eq.bits[None, :, :]).sum(axis=2)
print("shape", eq.bits.shape, "off-diagonal distances", sorted(set(d[~np.eye(4, dtype=bool)].tolist())))

# %%
# Independent issues for simulation.
print(iid_issue_profile(6, 4, 0.3, seed=1).bits)
