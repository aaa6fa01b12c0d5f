"""Closed-form approximation-ratio bounds, regret and committee-size scans.

The one-issue quantities here feed the worst-case analysis of k-sortition: a
multi-issue profile's ratio never exceeds the worst single-issue ratio, so
every scan in this module runs over single-issue profiles only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import hypergeom
from .errors import ValidationError
from .exact_eval import ar_one_issue_kmaj_many

KMAJ_UPPER_CONSTANT = 6.0 * math.exp(-0.5)


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function (no cancellation in the left tail)."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _check_positive(name, value):
    if value < 1:
        raise ValidationError(f"{name} must be >= 1, got {value}")


def kmaj_upper_bound(k: int) -> float:
    """``1 + 6 exp(-1/2) / sqrt(k)``."""
    _check_positive("k", k)
    return 1.0 + KMAJ_UPPER_CONSTANT / math.sqrt(k)


def kmaj_lower_bound(k: int) -> float:
    """``1 + 2 (Phi(-1) - 1/sqrt(k)) / sqrt(k)``; below 1 (vacuous) for small ``k``."""
    _check_positive("k", k)
    r = math.sqrt(k)
    return 1.0 + 2.0 * (normal_cdf(-1.0) - 1.0 / r) / r


def lower_bound_applies(n: int, k: int) -> bool:
    """The lower bound needs ``2 (k + 1)^2 <= n``."""
    return 2 * (k + 1) ** 2 <= n


def kmaj3_exact_limit() -> tuple[float, float]:
    """Large-``n`` worst one-issue ratio of 3-sortition and the worst supporter fraction."""
    root7 = math.sqrt(7.0)
    return 1.0 + (7.0 * root7 - 10.0) / 27.0, (4.0 - root7) / 6.0


def krep_one_issue_ar(k: int, *, exact: bool = False):
    """``1 + (1 - 1/k)^(k-1) / (k 2^(k-1))``, with ``0^0 = 1`` so that ``k = 1`` gives 2."""
    _check_positive("k", k)
    val = 1 + Fraction(k - 1, k) ** (k - 1) / (k * 2 ** (k - 1))
    return val if exact else float(val)


def krep_iid_upper_bound(m: int, k: int) -> float:
    """``1 + m^(m+1) exp(-k / (2m)^m)`` for ``m`` i.i.d. issues."""
    _check_positive("m", m)
    _check_positive("k", k)
    return 1.0 + m ** (m + 1) * math.exp(-k / (2 * m) ** m)


def krep_iid_intermediate_bound(m: int, k: int) -> float:
    """``1 + m 2^(m+1) exp(-k / (2m)^m)``, the form before simplification; tighter only once ``m >= 3``."""
    _check_positive("m", m)
    _check_positive("k", k)
    return 1.0 + m * 2 ** (m + 1) * math.exp(-k / (2 * m) ** m)


def two_cluster_curve(alpha, k: int):
    """Ratio lower bound ``2 alpha + alpha^k - 2 alpha^(k+1)`` of the two-cluster construction."""
    _check_positive("k", k)
    if np.any((np.asarray(alpha) < 0) | (np.asarray(alpha) > 1)):
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
    return 2 * alpha + alpha**k - 2 * alpha ** (k + 1)


class ManyIssueLower(NamedTuple):
    value: Fraction
    maximizer: Fraction


def krep_many_issue_lower() -> ManyIssueLower:
    """Lower bound 9/8 on the many-issue ratio of weighted sortition, attained by the curve at ``alpha = 3/4``."""
    return ManyIssueLower(Fraction(9, 8), Fraction(3, 4))


@dataclass
class BoundReport:
    name: str
    params: dict
    bound_value: float
    side: str
    compared_to: float | None = None
    satisfied: bool | None = field(default=None)

    def __post_init__(self):
        if self.side not in ("upper", "lower"):
            raise ValidationError(f"side must be 'upper' or 'lower', got {self.side!r}")
        if self.compared_to is not None:
            self.satisfied = self._holds(self.compared_to)

    def _holds(self, observed) -> bool:
        if self.side == "upper":
            return bool(observed <= self.bound_value)
        return bool(observed >= self.bound_value)

    def compare(self, observed) -> "BoundReport":
        return BoundReport(self.name, dict(self.params), self.bound_value, self.side, float(observed))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "bound_value": self.bound_value,
            "side": self.side,
            "compared_to": self.compared_to,
            "satisfied": self.satisfied,
        }


def ar_rows(n: int, ks) -> list[dict]:
    """One row per ``k``: exact one-issue ratio, worst ``n1`` and both k-sortition bounds."""
    ks = sorted(set(int(k) for k in ks))
    ratios, worst = ar_one_issue_kmaj_many(n, ks)
    rows = []
    for k, r, w in zip(ks, ratios.tolist(), worst.tolist()):
        upper, lower = kmaj_upper_bound(k), kmaj_lower_bound(k)
        applies = lower_bound_applies(n, k)
        rows.append(
            {
                "n": n,
                "k": k,
                "ar": r,
                "worst_n1": w,
                "upper": upper,
                "upper_satisfied": r <= upper,
                "lower": lower,
                "lower_applies": applies,
                "lower_satisfied": (r >= lower) if applies else None,
            }
        )
    return rows


def bounds_rows(ks, ms) -> list[dict]:
    """All closed-form bound values on the ``k x m`` grid, ordered by ``(k, m)``."""
    ks = sorted(set(int(k) for k in ks))
    ms = sorted(set(int(m) for m in ms))
    if not ks or not ms:
        raise ValidationError("k and m lists must be nonempty")
    rows = []
    for k in ks:
        for m in ms:
            rows.append(
                {
                    "k": k,
                    "m": m,
                    "kmaj_upper": kmaj_upper_bound(k),
                    "kmaj_lower": kmaj_lower_bound(k),
                    "krep_one_issue_ar": krep_one_issue_ar(k),
                    "krep_iid_upper": krep_iid_upper_bound(m, k),
                    "krep_iid_intermediate": krep_iid_intermediate_bound(m, k),
                }
            )
    return rows


def regret(expected_cost, optimal_cost, c, k: int, m: int):
    """``expected_cost + c k m - optimal_cost``."""
    if c <= 0:
        raise ValidationError(f"elicitation cost c must be positive, got {c}")
    return expected_cost + c * k * m - optimal_cost


def worst_one_issue_regret(n: int, ks, c, *, cells: int = 2_000_000) -> np.ndarray:
    """Per ``k``, the maximum over supporter counts of one-issue regret.

    For ``n1 <= n/2`` the excess over optimum is ``pi(n1) (n - 2 n1)``; the
    mirrored counts give the same excess, and ``n1 = 0`` gives none.
    """
    if c <= 0:
        raise ValidationError(f"elicitation cost c must be positive, got {c}")
    ks = np.atleast_1d(np.asarray(ks, dtype=np.int64))
    if ks.size == 0:
        raise ValidationError("k grid must be nonempty")
    if ks.min() < 1 or ks.max() > n:
        raise ValidationError(f"committee sizes must lie in 1..{n}")
    H = n // 2
    excess = np.zeros(ks.size)
    if H:
        gap = n - 2 * np.arange(H + 1, dtype=np.float64)
        chunk = max(1, cells // (H + 1))
        for start in range(0, ks.size, chunk):
            sel = ks[start : start + chunk]
            rows = hypergeom.selects_one_rows(n, sel, H)
            rows *= gap
            excess[start : start + sel.size] = rows.max(axis=1)
    return excess + c * ks


def optimal_k_scan(n: int, c, k_grid) -> tuple[int, list[dict]]:
    """Committee size minimizing worst-case one-issue regret; ties go to the smaller ``k``."""
    ks = np.array(sorted(set(int(k) for k in k_grid)), dtype=np.int64)
    values = worst_one_issue_regret(n, ks, c)
    best = int(ks[int(np.argmin(values))])
    return best, [{"n": n, "k": int(k), "regret": float(v)} for k, v in zip(ks, values)]


def regret_scaling_check(n: int, c, k_grid, *, factor: int = 8, window=(2.8, 5.8)) -> dict:
    """Compare optimal sizes at ``n`` and ``factor * n``; the ratio should bracket ``factor^(2/3)``."""
    k_small, _ = optimal_k_scan(n, c, [k for k in k_grid if k <= n])
    k_large, _ = optimal_k_scan(factor * n, c, k_grid)
    ratio = k_large / k_small
    return {
        "n": [n, factor * n],
        "c": c,
        "k_star": [k_small, k_large],
        "ratio": ratio,
        "expected": factor ** (2 / 3),
        "window": list(window),
        "consistent": window[0] <= ratio <= window[1],
    }
