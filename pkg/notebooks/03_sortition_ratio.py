"""
Worst-case ratio of k-sortition on one issue
=============================================

On a single issue the expected cost is ``n1 + pi (n - 2 n1)`` where ``pi`` is
the chance a committee majority sides with the ``n1`` minority.  Scanning all
``n1`` gives the exact worst-case ratio, which we compare with the closed-form
upper and lower bounds in ``k``.
"""

# %%
import numpy as np

from sortition.bounds import ar_rows, kmaj3_exact_limit, kmaj_lower_bound, kmaj_upper_bound
from sortition.exact_eval import ar_one_issue_kmaj, ar_one_issue_kmaj_many

ratio, n1 = ar_one_issue_kmaj(100_000, 3)
print(f"k=3: ratio {ratio:.5f} at n1/n = {n1 / 1e5:.4f}; limit {kmaj3_exact_limit()}")

# %%
for row in ar_rows(5000, [1, 3, 9, 25, 49]):
    print(f"k={row['k']:3d} ar={row['ar']:.4f} upper={row['upper']:.4f} lower={row['lower']:.4f} "
          f"(applies: {row['lower_applies']})")

# %%
# An even committee matches the odd size below it exactly when ties count half.
ks = np.arange(1, 41)
a, _ = ar_one_issue_kmaj_many(400, ks, parity_shortcut=False)
print("max |AR(2j) - AR(2j-1)| =", np.max(np.abs(a[1::2] - a[0::2])))

# %%
# The gap to 1 shrinks like 1/sqrt(k).
for k in (1, 4, 16, 64, 256):
    r, _ = ar_one_issue_kmaj(20_000, k)
    print(k, round((r - 1) * np.sqrt(k), 3), round(kmaj_upper_bound(k), 4), round(kmaj_lower_bound(k), 4))
