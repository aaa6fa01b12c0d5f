"""
Choosing the committee size
===========================

Asking each member about each issue costs ``c``.  Regret adds ``c k m`` to the
expected cost and subtracts the optimum; on one issue the worst case over
supporter counts is ``max pi (n - 2 n1) + c k``.  The minimizing ``k`` grows
like ``n^(2/3)``.
"""

# %%
from sortition.bounds import optimal_k_scan, regret_scaling_check

best, rows = optimal_k_scan(10_000, 1.0, range(1, 400))
print("best k at n=10^4:", best)
print([(r["k"], round(r["regret"], 2)) for r in rows[best - 3 : best + 2]])

# %%
rep = regret_scaling_check(10_000, 1.0, range(1, 2001))
print(rep["k_star"], f"ratio {rep['ratio']:.3f} vs 8^(2/3) = {rep['expected']:.3f}")
