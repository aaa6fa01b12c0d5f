"""
Weighted sortition: delegating to the closest members
=====================================================

Under ``krep`` each voter splits one unit of weight equally among its closest
committee members (Hamming distance), then issues go by weighted majority.
"""

# %%
from sortition import PreferenceProfile, delegation_weights
from sortition.bounds import krep_iid_upper_bound, krep_many_issue_lower, krep_one_issue_ar, two_cluster_curve
from sortition.exact_eval import enumerate_expected_cost
from sortition.profiles import iid_issue_profile, single_issue, two_cluster_profile

prof = PreferenceProfile([[1, 1], [1, 0], [0, 0], [0, 0], [0, 1]])
print("weights of members (0, 2):", delegation_weights(prof, [0, 2]))

# %%
# One issue: the worst ratio approaches its limit from below as n grows.
for k in (1, 2, 3):
    worst = max(float(enumerate_expected_cost(single_issue(60, a), k, "krep").ratio.value) for a in range(31))
    print(f"k={k}: n=60 worst {worst:.4f}, limit {krep_one_issue_ar(k):.4f}")

# %%
# Independent issues concentrate fast; the bound is loose but valid.
p = iid_issue_profile(24, 2, 0.4, seed=0)
print(float(enumerate_expected_cost(p, 16, "krep").ratio.value), "<=", krep_iid_upper_bound(2, 16))

# %%
# Two clusters: a diffuse majority and a unanimous minority that is closer to
# every voter than the diffuse voters are to each other.  The minority soaks
# up all delegated weight whenever it is on the committee.
tc = two_cluster_profile(24, 20000, 0.75, 0.05, 0.04, 0.1, seed=7)
for k in (1, 2, 3):
    print(k, round(float(enumerate_expected_cost(tc, k, "krep").ratio.value), 4), two_cluster_curve(0.75, k))
print("many-issue lower bound:", krep_many_issue_lower())
