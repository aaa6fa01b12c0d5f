"""Exact expected costs and approximation ratios.

Two independent routes compute the expected social cost of k-sortition:

* the closed route, which sums over issues the hypergeometric probability that
  a random committee's majority picks alternative 1 (:func:`kmaj_expected_cost_exact`);
* brute force over every committee (:func:`enumerate_expected_cost`), which is
  also the only exact route for the proximity-weighted rule.

Enumeration can run over individual committees or, when the profile has few
distinct rows, over committee *compositions* (how many members of each voter
type), weighting each composition by its multivariate hypergeometric count.
Both schemes give identical exact fractions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import hypergeom
from .config import DEFAULT_CAPS
from .errors import ResourceLimitError, ValidationError
from .metrics import CostRatio, cost_ratio, distance_matrix, expected_social_cost, optimal_cost
from .profiles import PreferenceProfile
from .rules import (
    _probs_from_margin,
    maj_outcome_probs,
    mindist_committee_rule,
    rd_expected_cost,
    weighted_majority_scaled,
)

FREE = "free"

_INT64_SAFE = 2**62


@dataclass(frozen=True)
class HypergeomParams:
    """Population ``n`` with ``K`` successes, ``k`` draws without replacement."""

    n: int
    K: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"n must be positive, got {self.n}")
        if not 0 <= self.K <= self.n:
            raise ValidationError(f"need 0 <= K <= n, got K={self.K}, n={self.n}")
        if not 1 <= self.k <= self.n:
            raise ValidationError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")


@dataclass
class EvalReport:
    expected_cost: float | Fraction
    optimal_cost: int
    ratio: CostRatio
    method: str
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "expected_cost": float(self.expected_cost),
            "optimal_cost": float(self.optimal_cost),
            "ratio": self.ratio.to_dict(),
            "method": self.method,
            "detail": self.detail,
        }


def _report(profile, expected, method, **detail) -> EvalReport:
    opt = optimal_cost(profile)
    return EvalReport(expected, opt, cost_ratio(expected, opt), method, detail)


def hypergeom_pmf(params: HypergeomParams, q: int, *, exact: bool = False, exact_n: int | None = None):
    """``C(K, q) C(n-K, k-q) / C(n, k)``, zero when infeasible.

    Big-integer arithmetic for ``n <= exact_n`` (default 1000) or when
    ``exact`` is set, in which case a :class:`~fractions.Fraction` is returned.
    """
    limit = DEFAULT_CAPS.exact_binomial_n if exact_n is None else exact_n
    if exact:
        return hypergeom.exact_pmf(q, params.n, params.K, params.k)
    if params.n <= limit:
        return float(hypergeom.exact_pmf(q, params.n, params.K, params.k))
    return float(hypergeom.pmf(q, params.n, params.K, params.k))


def hypergeom_variance(params: HypergeomParams) -> Fraction:
    """``k p (1-p) (n-k)/(n-1)`` with ``p = K/n``."""
    n, K, k = params.n, params.K, params.k
    if n == 1:
        return Fraction(0)
    p = Fraction(K, n)
    return k * p * (1 - p) * Fraction(n - k, n - 1)


def p_committee_selects_one(params: HypergeomParams, *, exact: bool = False, exact_n: int | None = None):
    """Probability that the majority of a uniform ``k``-committee picks 1 (ties count half)."""
    limit = DEFAULT_CAPS.exact_binomial_n if exact_n is None else exact_n
    if exact:
        return hypergeom.exact_selects_one(params.n, params.K, params.k)
    if params.n <= limit:
        return float(hypergeom.exact_selects_one(params.n, params.K, params.k))
    return hypergeom.selects_one(params.n, params.K, params.k)


def _check_k(n, k):
    if not 1 <= k <= n:
        raise ValidationError(f"need 1 <= k <= n, got k={k}, n={n}")


def kmaj_expected_cost_exact(
    profile: PreferenceProfile, k: int, *, exact: bool = False, exact_n: int | None = None
) -> EvalReport:
    """Expected social cost of k-sortition by linearity over issues.

    Issue ``j`` with ``n1_j`` supporters contributes
    ``(1 - pi_j) n1_j + pi_j (n - n1_j)`` where ``pi_j`` is the chance that the
    committee majority picks 1.
    """
    n = profile.n
    _check_k(n, k)
    support = profile.support()
    values, counts = np.unique(support, return_counts=True)
    total = Fraction(0) if exact else 0.0
    for K, cnt in zip(values.tolist(), counts.tolist()):
        pi = p_committee_selects_one(HypergeomParams(n, K, k), exact=exact, exact_n=exact_n)
        total += cnt * ((1 - pi) * K + pi * (n - K))
    return _report(profile, total, "exact-hypergeometric", k=k)


def _voter_types(profile: PreferenceProfile):
    rows, inverse, counts = np.unique(profile.bits, axis=0, return_inverse=True, return_counts=True)
    return rows, np.asarray(inverse).reshape(-1), counts


def count_compositions(counts, k: int) -> int:
    """Number of vectors ``c`` with ``0 <= c_t <= counts[t]`` and ``sum(c) = k``."""
    ways = [1] + [0] * k
    for cap in counts:
        nxt = [0] * (k + 1)
        for s, w in enumerate(ways):
            if w:
                for c in range(min(int(cap), k - s) + 1):
                    nxt[s + c] += w
        ways = nxt
    return ways[k]


def _compositions(counts, k: int) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.int64)
    suffix = np.concatenate([np.cumsum(counts[::-1])[::-1], [0]])
    partial = np.zeros((1, 0), dtype=np.int64)
    sums = np.zeros(1, dtype=np.int64)
    for t, cap in enumerate(counts.tolist()):
        choices = np.arange(cap + 1)
        new_sums = (sums[:, None] + choices[None, :]).reshape(-1)
        parents = np.repeat(np.arange(len(sums)), cap + 1)
        picks = np.tile(choices, len(sums))
        keep = (new_sums <= k) & (new_sums + suffix[t + 1] >= k)
        partial = np.hstack([partial[parents[keep]], picks[keep, None]])
        sums = new_sums[keep]
    return partial


def _twice_cost(probs, support, n):
    """``2 * expected cost`` as integers; ``probs`` entries lie in ``{0, 1/2, 1}``."""
    two_pi = np.rint(2 * probs).astype(np.int64)
    return (two_pi * (n - support) + (2 - two_pi) * support).sum(axis=-1)


def _batch_rows(k, m, budget=4_000_000):
    return max(1, budget // max(1, k * m))


def _row_scales(tied: np.ndarray, k: int) -> np.ndarray:
    """Per row, the lcm of its tie-set sizes (object dtype once int64 could overflow)."""
    if k <= 40:
        # lcm(1..40) < 2^63, so the reduction cannot wrap
        return np.lcm.reduce(tied, axis=1)
    return np.array([math.lcm(*(int(t) for t in np.unique(row))) for row in tied], dtype=object)


def _delegated_twice_costs(closest, tied, voter_counts, group_mult, group_bits, support, n, k):
    """Doubled expected costs of a batch of committees under proximity delegation.

    ``closest[b, t, g]`` marks the member groups nearest to voter type ``t``,
    ``tied[b, t]`` the number of members over which that type splits its
    weight, ``group_mult[b, g]`` the members per group and ``group_bits`` the
    group rows, either shared ``(G, m)`` or per committee ``(B, G, m)``.
    Weights are integers after scaling each row by the lcm of its tie sizes.
    """
    B = closest.shape[0]
    scales = _row_scales(tied, k)
    out = np.empty(B, dtype=np.int64)
    fast = np.array([2 * n * int(s) < _INT64_SAFE for s in scales]) if scales.dtype == object else 2 * n * scales < _INT64_SAFE
    idx = np.flatnonzero(fast)
    if idx.size:
        sc = scales[idx].astype(np.int64)
        shares = voter_counts[None, :] * (sc[:, None] // tied[idx])
        weights = group_mult[idx] * np.einsum("btg,bt->bg", closest[idx].astype(np.int64), shares)
        if group_bits.ndim == 2:
            sup = weights @ group_bits
        else:
            sup = np.einsum("bg,bgm->bm", weights, group_bits[idx])
        probs = _probs_from_margin(2 * sup, (n * sc)[:, None])
        out[idx] = _twice_cost(probs, support, n)
    for b in np.flatnonzero(~fast):
        scale = int(scales[b])
        share = [int(c) * (scale // int(t)) for c, t in zip(voter_counts, tied[b])]
        groups = np.flatnonzero(group_mult[b])
        w = [int(group_mult[b, g]) * sum(share[t] for t in np.flatnonzero(closest[b, :, g])) for g in groups]
        rows = group_bits if group_bits.ndim == 2 else group_bits[b]
        probs = weighted_majority_scaled(w, n * scale, rows[groups])
        out[b] = _twice_cost(probs, support, n)
    return out


def _enumerate_committees(profile, k, rule):
    n, m = profile.n, profile.m
    bits = profile.bits.astype(np.int64)
    support = profile.support()
    combos = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64)
    total = 0
    step = _batch_rows(k, m)
    if rule == "kmaj":
        for start in range(0, len(combos), step):
            block = combos[start : start + step]
            probs = _probs_from_margin(2 * bits[block].sum(axis=1), k)
            total += int(_twice_cost(probs, support, n).sum())
        return total, len(combos)

    _, inverse, counts = _voter_types(profile)
    type_to_voter = distance_matrix(profile)[np.unique(inverse, return_index=True)[1]]
    ones = np.ones((1, k), dtype=np.int64)
    for start in range(0, len(combos), step):
        block = combos[start : start + step]
        dist = type_to_voter[:, block].transpose(1, 0, 2)
        closest = dist == dist.min(axis=2, keepdims=True)
        tied = closest.sum(axis=2)
        mult = np.broadcast_to(ones, block.shape)
        total += int(_delegated_twice_costs(closest, tied, counts, mult, bits[block], support, n, k).sum())
    return total, len(combos)


def _enumerate_types(profile, k, rule, comps):
    n, m = profile.n, profile.m
    rows, _, counts = _voter_types(profile)
    R = rows.astype(np.int64)
    support = profile.support()
    T = len(counts)
    mult = [math.prod(math.comb(int(N), int(c)) for N, c in zip(counts, comp)) for comp in comps]
    twice = np.empty(len(comps), dtype=np.int64)
    if rule == "kmaj":
        step = _batch_rows(T, m)
        for start in range(0, len(comps), step):
            block = comps[start : start + step]
            probs = _probs_from_margin(2 * (block @ R), k)
            twice[start : start + len(block)] = _twice_cost(probs, support, n)
    else:
        DT = (R[:, None, :] != R[None, :, :]).sum(axis=2)
        step = max(1, min(_batch_rows(T * T, 1, budget=2_000_000), _batch_rows(T, m)))
        for start in range(0, len(comps), step):
            block = comps[start : start + step]
            dist = np.where(block[:, None, :] > 0, DT[None, :, :], np.iinfo(np.int64).max)
            closest = dist == dist.min(axis=2, keepdims=True)
            tied = (closest * block[:, None, :]).sum(axis=2)
            twice[start : start + len(block)] = _delegated_twice_costs(closest, tied, counts, block, R, support, n, k)
    return sum(a * int(b) for a, b in zip(mult, twice)), len(comps)


def enumerate_expected_cost(
    profile: PreferenceProfile,
    k: int,
    rule: str = "kmaj",
    *,
    cap: int | None = None,
    scheme: str = "auto",
) -> EvalReport:
    """Exact expected cost of ``kmaj`` or ``krep`` by visiting every committee.

    Parameters
    ----------
    scheme : {"auto", "committees", "types"}
        ``committees`` visits all ``C(n, k)`` subsets; ``types`` visits the
        compositions over distinct voter rows.  ``auto`` picks the smaller.

    Raises
    ------
    ResourceLimitError
        If the chosen scheme would visit more than ``cap`` items.
    """
    if rule not in ("kmaj", "krep"):
        raise ValidationError(f"enumeration supports 'kmaj' and 'krep', got {rule!r}")
    n = profile.n
    _check_k(n, k)
    limit = DEFAULT_CAPS.enumeration if cap is None else cap
    n_committees = math.comb(n, k)
    _, _, counts = _voter_types(profile)
    if scheme == "auto":
        n_comps = count_compositions(counts, k) if len(counts) < n else n_committees
        scheme = "types" if n_comps < n_committees else "committees"
    if scheme == "committees":
        if n_committees > limit:
            raise ResourceLimitError(f"C({n},{k}) = {n_committees} committees exceeds the enumeration cap {limit}")
        twice, visited = _enumerate_committees(profile, k, rule)
        weight_total = n_committees
    elif scheme == "types":
        n_comps = count_compositions(counts, k)
        if n_comps > limit:
            raise ResourceLimitError(f"{n_comps} committee compositions exceed the enumeration cap {limit}")
        twice, visited = _enumerate_types(profile, k, rule, _compositions(counts, k))
        weight_total = n_committees
    else:
        raise ValidationError(f"unknown scheme {scheme!r}")
    expected = Fraction(twice, 2 * weight_total)
    return _report(profile, expected, "exact-enumeration", rule=rule, k=k, scheme=scheme, visited=visited)


def ar_one_issue_kmaj(n: int, k: int, *, exact: bool = False):
    """Worst one-issue ratio of k-sortition over all supporter counts.

    Scans ``n1 = 1 .. n // 2`` (minority supporters of 1; the mirrored half is
    symmetric) and the unanimous profile, whose ratio is 1.  Returns
    ``(ratio, worst_n1)`` with ``worst_n1 = 0`` when no split beats unanimity;
    ties go to the smallest ``n1``.
    """
    _check_k(n, k)
    if exact:
        best, arg = Fraction(1), 0
        for n1 in range(1, n // 2 + 1):
            pi = hypergeom.exact_selects_one(n, n1, k)
            r = 1 + pi * Fraction(n - 2 * n1, n1)
            if r > best:
                best, arg = r, n1
        return best, arg
    ratios, worst = ar_one_issue_kmaj_many(n, [k])
    return float(ratios[0]), int(worst[0])


def _one_issue_ratio_rows(n, ks):
    """Ratios with one row per ``k`` and ``n1 = 1 .. n // 2`` along it."""
    H = n // 2
    rows = hypergeom.selects_one_rows(n, ks, H)[:, 1:]
    n1 = np.arange(1, H + 1, dtype=np.float64)
    rows *= (n - 2 * n1) / n1
    rows += 1.0
    return rows


def ar_one_issue_kmaj_many(n: int, ks, *, cells: int = 2_000_000, parity_shortcut: bool = True):
    """Vectorized :func:`ar_one_issue_kmaj` for many committee sizes at one ``n``.

    With ``parity_shortcut`` an even ``k`` reuses the column of ``k - 1``:
    dropping a uniformly random member of a uniform ``k``-committee leaves a
    uniform ``(k-1)``-committee, and with ties counted as one half the two
    selection probabilities coincide exactly.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=np.int64))
    if ks.size and (ks.min() < 1 or ks.max() > n):
        raise ValidationError(f"committee sizes must lie in 1..{n}")
    eval_ks = ks - (ks % 2 == 0) if parity_shortcut else ks
    uniq, back = np.unique(eval_ks, return_inverse=True)
    out = np.ones(uniq.size)
    worst = np.zeros(uniq.size, dtype=np.int64)
    H = n // 2
    if H == 0:
        return out[back], worst[back]
    chunk = max(1, cells // (H + 1))
    for start in range(0, uniq.size, chunk):
        sel = uniq[start : start + chunk]
        ratios = _one_issue_ratio_rows(n, sel)
        idx = np.argmax(ratios, axis=1)
        best = ratios[np.arange(sel.size), idx]
        better = best > 1.0
        out[start : start + sel.size] = np.where(better, best, 1.0)
        worst[start : start + sel.size] = np.where(better, idx + 1, 0)
    return out[back], worst[back]


def optimal_issue_wise_thresholds(n: int, n1: int, k: int) -> tuple:
    """Per-count outcome probabilities minimizing the cost summed over a profile and its complement.

    On the permutation-indexed equidistant profile with ``n1`` supporters per
    issue, a uniformly drawn committee holds ``q`` supporters with weight
    ``a_q = C(n1, q) C(n-n1, k-q)`` and, on the complemented profile,
    ``b_q = C(n-n1, q) C(n1, k-q)``.  The summed cost is linear in ``h_q``
    with slope ``(n - 2 n1)(b_q - a_q)``, so ``h_q = 0`` when ``a_q > b_q``,
    ``1`` when smaller and :data:`FREE` when equal.
    """
    if not 1 <= n1 <= n / 2:
        raise ValidationError(f"need 1 <= n1 <= n/2, got n1={n1}, n={n}")
    _check_k(n, k)
    out = []
    for q in range(k + 1):
        a = math.comb(n1, q) * math.comb(n - n1, k - q)
        b = math.comb(n - n1, q) * math.comb(n1, k - q)
        out.append(0 if a > b else 1 if a < b else FREE)
    return tuple(out)


def majority_deviations(n: int, n1: int, k: int, thresholds=None) -> list:
    """Counts ``q != k/2`` where the optimum is forced and disagrees with the committee majority."""
    h = optimal_issue_wise_thresholds(n, n1, k) if thresholds is None else thresholds
    bad = []
    for q, value in enumerate(h):
        if 2 * q == k or value == FREE:
            continue
        if value != (1 if 2 * q > k else 0):
            bad.append({"n": n, "n1": n1, "k": k, "q": q, "h": value})
    return bad


def optimality_check(n_max: int, k_max: int) -> dict:
    """Scan ``n <= n_max``, ``1 <= n1 <= n/2``, ``k <= min(k_max, n)`` for deviations from majority."""
    if n_max < 1 or k_max < 1:
        raise ValidationError("n_max and k_max must be positive")
    cases = free = 0
    deviations = []
    for n in range(1, n_max + 1):
        for n1 in range(1, n // 2 + 1):
            for k in range(1, min(k_max, n) + 1):
                h = optimal_issue_wise_thresholds(n, n1, k)
                cases += 1
                free += sum(1 for q, v in enumerate(h) if v == FREE and 2 * q != k)
                deviations.extend(majority_deviations(n, n1, k, h))
    return {"cases": cases, "free_off_center": free, "deviations": deviations}


def permutation_average_cost(
    profile: PreferenceProfile,
    rule: Callable[[PreferenceProfile], object],
    samples: int = 1000,
    seed=0,
    *,
    exact_max_n: int = 7,
):
    """Average of ``rule(pi(X))`` over voter permutations ``pi``.

    All ``n!`` permutations when ``n <= exact_max_n``, otherwise ``samples``
    uniform draws.  ``rule`` maps a profile to its expected social cost.
    """
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    n = profile.n
    if n <= exact_max_n:
        perms = itertools.permutations(range(n))
        count = math.factorial(n)
    else:
        rng = np.random.default_rng(seed)
        perms = (rng.permutation(n) for _ in range(samples))
        count = samples
    total = 0
    for perm in perms:
        total += rule(PreferenceProfile(profile.bits[list(perm)]))
    if isinstance(total, (int, Fraction)):
        return Fraction(total, count)
    return total / count


def expected_cost(
    profile: PreferenceProfile, rule: str, k: int | None = None, *, cap: int | None = None, exact_n: int | None = None
) -> EvalReport:
    """Exact expected cost for any rule id, using the cheapest exact route."""
    if rule == "maj":
        return _report(profile, expected_social_cost(profile, maj_outcome_probs(profile)), "exact-closed-form")
    if rule == "rd":
        return _report(profile, rd_expected_cost(profile), "exact-closed-form")
    if k is None:
        raise ValidationError(f"rule {rule!r} needs a committee size k")
    if rule == "kmaj":
        return kmaj_expected_cost_exact(profile, k, exact_n=exact_n)
    if rule == "krep":
        return enumerate_expected_cost(profile, k, "krep", cap=cap)
    if rule == "mindist":
        out = mindist_committee_rule(profile, k, cap=cap)
        return _report(
            profile,
            expected_social_cost(profile, out.outcome_probs),
            "exact-enumeration",
            k=k,
            committees=len(out.committees),
        )
    raise ValidationError(f"unknown rule {rule!r}")
