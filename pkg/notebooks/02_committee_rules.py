"""
Committee rules and their exact expected cost
=============================================

Five rules are available by id: ``maj`` (population majority), ``rd``
(random dictator), ``kmaj`` (uniform committee of size k, simple majority),
``krep`` (uniform committee, every voter's unit weight goes to its closest
members) and ``mindist`` (committees minimizing the total member distance).
"""

# %%
from sortition import expected_cost
from sortition.exact_eval import enumerate_expected_cost, kmaj_expected_cost_exact
from sortition.profiles import iid_issue_profile, single_issue

prof = iid_issue_profile(9, 5, 0.4, seed=3)
for rule, k in [("maj", None), ("rd", None), ("kmaj", 3), ("krep", 3), ("mindist", 3)]:
    rep = expected_cost(prof, rule, k)
    print(f"{rule:8s} cost={float(rep.expected_cost):8.4f} ratio={float(rep.ratio.value):.4f} via {rep.method}")

# %%
# For k-sortition the closed hypergeometric sum and brute force over all
# C(n, k) committees give the same exact fraction.
closed = kmaj_expected_cost_exact(prof, 4, exact=True).expected_cost
brute = enumerate_expected_cost(prof, 4, "kmaj", scheme="committees").expected_cost
print(closed, brute, closed == brute)

# %%
# A single random member is the random dictator: with one supporter among
# ten voters the ratio is 2 - 2/10.
print(float(kmaj_expected_cost_exact(single_issue(10, 1), 1).ratio.value))

# %%
# When the profile has few distinct rows, enumeration over committee
# compositions is much cheaper than over committees.
big = single_issue(200, 60)
rep = enumerate_expected_cost(big, 5, "krep")
print(rep.detail, float(rep.ratio.value))
