"""
Why committee majority is the right inner rule
==============================================

Average the cost over an equidistant profile and its complement.  For each
count ``q`` of supporters on the committee, the summed cost is linear in the
probability ``h_q`` of choosing 1, so the optimum puts ``h_q`` at 0 or 1 by
comparing two binomial products.  Majority thresholds come out every time.
"""

# %%
from sortition import PreferenceProfile
from sortition.exact_eval import optimal_issue_wise_thresholds, optimality_check, permutation_average_cost
from sortition.metrics import social_cost

print(optimal_issue_wise_thresholds(10, 3, 3))
print(optimal_issue_wise_thresholds(8, 4, 2), "(an evenly split issue leaves every count free)")

# %%
rep = optimality_check(30, 9)
print(rep["cases"], "cases,", len(rep["deviations"]), "deviations")

# %%
# Averaging over voter permutations makes any rule anonymous; a fixed
# dictator becomes the random dictator.
prof = PreferenceProfile([[1, 1], [0, 0], [0, 1]])
print(permutation_average_cost(prof, lambda q: social_cost(q, q.bits[0])))
