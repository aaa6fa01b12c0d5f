"""Committee voting rules as per-issue outcome probabilities.

Every rule here is issue-wise once the committee is fixed: the chance that
issue ``j`` is decided as 1 depends only on the committee's column ``j`` (and,
for weighted rules, on the member weights).  Ties are always resolved by a fair
coin, so the returned probabilities lie in ``{0, 1/2, 1}``.

Rule identifiers: ``maj`` (whole population), ``rd`` (random dictator),
``kmaj`` (k-sortition), ``krep`` (k-sortition with proximity-delegated weights)
and ``mindist`` (deterministic min-total-distance committee with distance-sum
weights).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .config import DEFAULT_CAPS
from .errors import ResourceLimitError, ValidationError
from .metrics import distance_matrix
from .profiles import PreferenceProfile

RULE_IDS = ("maj", "rd", "kmaj", "krep", "mindist")

_INT64_SAFE = 2**62


@dataclass(frozen=True)
class Committee:
    """Sorted distinct voter indices, optionally with positive member weights."""

    members: tuple
    weights: tuple | None = None

    def __post_init__(self):
        members = tuple(int(c) for c in self.members)
        if not members:
            raise ValidationError("committee must have at least one member")
        if len(set(members)) != len(members):
            raise ValidationError(f"committee members must be distinct, got {members}")
        order = sorted(range(len(members)), key=members.__getitem__)
        object.__setattr__(self, "members", tuple(members[i] for i in order))
        if self.weights is not None:
            weights = tuple(self.weights)
            if len(weights) != len(members):
                raise ValidationError("one weight per member required")
            if any(w <= 0 for w in weights):
                raise ValidationError("committee weights must be strictly positive")
            object.__setattr__(self, "weights", tuple(weights[i] for i in order))

    @property
    def k(self) -> int:
        return len(self.members)

    def check(self, n: int) -> None:
        if self.members[0] < 0 or self.members[-1] >= n:
            raise ValidationError(f"committee {self.members} has indices outside range({n})")


def floyd_sample(rng: np.random.Generator, n: int, k: int, size: int) -> np.ndarray:
    """``size`` independent uniform ``k``-subsets of ``range(n)`` as a ``(size, k)`` array.

    Floyd's algorithm: for ``j = n-k .. n-1`` draw ``t`` uniformly from
    ``0..j`` and take ``t`` unless already chosen, in which case take ``j``.
    Rows are not sorted.
    """
    if not 1 <= k <= n:
        raise ValidationError(f"need 1 <= k <= n, got k={k}, n={n}")
    out = np.empty((size, k), dtype=np.int64)
    for idx, j in enumerate(range(n - k, n)):
        t = rng.integers(0, j + 1, size=size)
        if idx:
            taken = (out[:, :idx] == t[:, None]).any(axis=1)
            t = np.where(taken, j, t)
        out[:, idx] = t
    return out


def sample_committee_uniform(n: int, k: int, seed) -> Committee:
    rng = np.random.default_rng(seed)
    return Committee(tuple(floyd_sample(rng, n, k, 1)[0]))


def _probs_from_margin(twice_for_one, total):
    """1 where ``2 * support > total``, 0 where below, 1/2 on exact ties."""
    return np.where(twice_for_one > total, 1.0, np.where(twice_for_one < total, 0.0, 0.5))


def maj_outcome_probs(profile: PreferenceProfile) -> np.ndarray:
    return _probs_from_margin(2 * profile.support(), profile.n)


def rd_expected_cost(profile: PreferenceProfile) -> Fraction:
    """Average over voters of the social cost of that voter's own vector."""
    support = profile.support()
    per_voter = np.where(profile.bits == 1, profile.n - support, support).sum(axis=1)
    return Fraction(int(per_voter.sum()), profile.n)


def _exact_weights(weights) -> bool:
    return all(isinstance(w, (int, np.integer, Rational)) for w in weights)


def committee_majority_probs(profile: PreferenceProfile, committee: Committee, *, tie_tolerance=None) -> np.ndarray:
    """Majority (or weighted majority) of the committee members, issue by issue.

    Integer or :class:`~fractions.Fraction` weights are compared exactly; float
    weights declare a tie when the margin is within ``tie_tolerance`` times the
    total weight.
    """
    committee.check(profile.n)
    bits = profile.bits[list(committee.members)].astype(np.int64)
    if committee.weights is None:
        return _probs_from_margin(2 * bits.sum(axis=0), committee.k)
    if _exact_weights(committee.weights):
        fr = [Fraction(w) for w in committee.weights]
        scale = math.lcm(*(f.denominator for f in fr))
        scaled = [int(f * scale) for f in fr]
        return weighted_majority_scaled(scaled, sum(scaled), bits)
    w = np.asarray(committee.weights, dtype=np.float64)
    tol = DEFAULT_CAPS.tie_tolerance if tie_tolerance is None else tie_tolerance
    total = w.sum()
    margin = 2.0 * (w @ bits) - total
    return np.where(np.abs(margin) <= tol * total, 0.5, np.where(margin > 0, 1.0, 0.0))


def weighted_majority_scaled(scaled_weights, total, member_bits) -> np.ndarray:
    """Per-issue outcome probabilities from integer-scaled member weights.

    ``scaled_weights[g]`` is the weight of member (or member group) ``g`` times
    a common scale and ``total`` their sum; ``member_bits`` has one row per
    member.
    """
    bits = np.asarray(member_bits)
    if total * 2 < _INT64_SAFE:
        w = np.asarray(scaled_weights, dtype=np.int64)
        support = w @ bits.astype(np.int64)
    else:
        w = np.asarray([int(x) for x in scaled_weights], dtype=object)
        support = w @ bits.astype(object)
    return _probs_from_margin(2 * support, total)


def scaled_delegation(dist, voter_mult, member_mult):
    """Integer-scaled proximity weights.

    Parameters
    ----------
    dist : (V, G) int array
        Distance from each voter type to each member group.
    voter_mult : (V,) int array
        Number of voters of each type.
    member_mult : (G,) int array
        Number of committee members in each group; members of one group share
        a preference vector, so a voter closest to that vector splits its unit
        evenly over all of them.

    Returns
    -------
    (weights, scale)
        ``weights[g] / scale`` is the total weight of group ``g``; weights sum
        to ``n * scale``.
    """
    dist = np.asarray(dist)
    voter_mult = np.asarray(voter_mult, dtype=np.int64)
    member_mult = np.asarray(member_mult, dtype=np.int64)
    closest = dist == dist.min(axis=1, keepdims=True)
    tied = (closest * member_mult).sum(axis=1)
    scale = math.lcm(*(int(s) for s in np.unique(tied)))
    n = int(voter_mult.sum())
    if 2 * n * scale < _INT64_SAFE:
        share = voter_mult * (scale // tied)
        weights = member_mult * (closest * share[:, None]).sum(axis=0)
        return weights, scale
    share = [int(v) * (scale // int(t)) for v, t in zip(voter_mult, tied)]
    weights = []
    for g in range(dist.shape[1]):
        col = closest[:, g]
        weights.append(int(member_mult[g]) * sum(s for s, c in zip(share, col) if c))
    return np.asarray(weights, dtype=object), scale


def _members_array(profile: PreferenceProfile, members) -> list:
    members = sorted(int(c) for c in members)
    if not members:
        raise ValidationError("members must be nonempty")
    if len(set(members)) != len(members) or members[0] < 0 or members[-1] >= profile.n:
        raise ValidationError(f"invalid members {members} for n={profile.n}")
    return members


def delegation_weights(profile: PreferenceProfile, members, *, dist=None) -> tuple:
    """Exact proximity weights of the given members.

    Every voter (members included) splits one unit of weight equally among the
    members closest to it in Hamming distance.  Returned as fractions in the
    sorted member order; they sum to ``n``.
    """
    members = _members_array(profile, members)
    d = distance_matrix(profile) if dist is None else dist
    weights, scale = scaled_delegation(d[:, members], np.ones(profile.n, dtype=np.int64), np.ones(len(members), dtype=np.int64))
    return tuple(Fraction(int(w), scale) for w in weights)


def krep_outcome_probs(profile: PreferenceProfile, members, *, dist=None) -> np.ndarray:
    members = _members_array(profile, members)
    d = distance_matrix(profile) if dist is None else dist
    weights, scale = scaled_delegation(d[:, members], np.ones(profile.n, dtype=np.int64), np.ones(len(members), dtype=np.int64))
    return weighted_majority_scaled(weights, profile.n * scale, profile.bits[members])


@dataclass(frozen=True)
class MinDistOutcome:
    """Uniform mixture over the committees minimizing total voter-to-committee distance.

    ``weights[t]`` holds the distance-sum weights ``sum_i d(x_i, x_c)`` of the
    members of ``committees[t]`` (zero when a member coincides with every
    voter, so they are kept apart from :class:`Committee`); ``outcome_probs``
    averages the per-issue outcome probabilities over the mixture.
    """

    committees: tuple
    weights: tuple
    total_distance: int
    outcome_probs: np.ndarray = field(repr=False)


def _distance_sum_majority(profile: PreferenceProfile, members, weights) -> np.ndarray:
    bits = profile.bits[list(members)]
    total = int(sum(weights))
    if total == 0:
        # every member coincides with every voter; fall back to the plain member majority
        return _probs_from_margin(2 * bits.sum(axis=0, dtype=np.int64), len(members))
    return weighted_majority_scaled(weights, total, bits)


def mindist_committee_rule(profile: PreferenceProfile, k: int, *, cap: int | None = None) -> MinDistOutcome:
    """Committee minimizing ``sum_i min_{c in C} d(x_i, x_c)``, ties mixed uniformly."""
    n = profile.n
    if not 1 <= k <= n:
        raise ValidationError(f"need 1 <= k <= n, got k={k}, n={n}")
    limit = DEFAULT_CAPS.enumeration if cap is None else cap
    count = math.comb(n, k)
    if count > limit:
        raise ResourceLimitError(f"C({n},{k}) = {count} committees exceeds the enumeration cap {limit}")
    d = distance_matrix(profile)
    best = None
    winners = []
    combos = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64)
    for start in range(0, len(combos), 4096):
        block = combos[start : start + 4096]
        totals = d[:, block].min(axis=2).sum(axis=0)
        low = int(totals.min())
        if best is None or low < best:
            best, winners = low, []
        if low == best:
            winners.extend(block[totals == best].tolist())
    column_sums = d.sum(axis=0)
    committees, all_weights = [], []
    probs = np.zeros(profile.m)
    for members in winners:
        weights = tuple(int(column_sums[c]) for c in members)
        probs += _distance_sum_majority(profile, members, weights)
        committees.append(Committee(tuple(members)))
        all_weights.append(weights)
    return MinDistOutcome(tuple(committees), tuple(all_weights), best, probs / len(winners))
