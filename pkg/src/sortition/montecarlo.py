"""Seeded Monte Carlo estimates of expected social cost.

Samples are drawn in fixed-size chunks.  Chunk ``c`` owns the generator
``default_rng([seed, c])`` and consumes it in a fixed order: all committee
draws of the chunk, then one fair coin per (sample, issue) for tie-breaking.
Chunk size depends only on the instance, so the estimate is identical for any
number of worker threads.  Per-chunk sums of costs and squared costs are
Python integers, which makes the merge exact and order-free.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ValidationError
from .metrics import CostRatio, cost_ratio, distance_matrix, optimal_cost
from .profiles import PreferenceProfile
from .rules import (
    RULE_IDS,
    _distance_sum_majority,
    _probs_from_margin,
    floyd_sample,
    maj_outcome_probs,
    mindist_committee_rule,
    scaled_delegation,
    weighted_majority_scaled,
)

_CELL_BUDGET = 4_000_000
_MAX_CHUNK = 8192
_DENSE_DISTANCE_N = 2000


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    samples: int
    ci95: tuple
    seed: int

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "samples": self.samples,
            "ci95": list(self.ci95),
            "seed": self.seed,
        }


def _chunk_size(k: int, m: int) -> int:
    return int(max(1, min(_MAX_CHUNK, _CELL_BUDGET // (max(k, 1) * m))))


class _Sampler:
    """Per-rule committee draw producing ``(B, m)`` outcome probabilities in ``{0, 1/2, 1}``."""

    def __init__(self, profile: PreferenceProfile, rule: str, k: int | None, cap: int | None):
        n, m = profile.n, profile.m
        if rule not in RULE_IDS:
            raise ValidationError(f"unknown rule {rule!r}; expected one of {', '.join(RULE_IDS)}")
        if rule == "rd":
            k = 1
        if rule in ("kmaj", "krep", "mindist", "rd"):
            if k is None:
                raise ValidationError(f"rule {rule!r} needs a committee size k")
            if not 1 <= k <= n:
                raise ValidationError(f"need 1 <= k <= n, got k={k}, n={n}")
        self.profile, self.rule, self.k = profile, rule, k
        self.bits = profile.bits.astype(np.int64)
        self.support = profile.support()
        if rule == "maj":
            self.fixed = maj_outcome_probs(profile)
        elif rule == "mindist":
            out = mindist_committee_rule(profile, k, cap=cap)
            self.mixture = np.array(
                [_distance_sum_majority(profile, c.members, w) for c, w in zip(out.committees, out.weights)]
            )
        elif rule == "krep":
            self.ones = self.bits.sum(axis=1)
            self.dist = distance_matrix(profile) if n <= _DENSE_DISTANCE_N else None
        self.chunk = _chunk_size(k or 1, m)

    def _krep_probs(self, members):
        if self.dist is not None:
            d = self.dist[:, members]
        else:
            d = self.ones[:, None] + self.ones[members][None, :] - 2 * (self.bits @ self.bits[members].T)
        n = self.profile.n
        w, scale = scaled_delegation(d, np.ones(n, dtype=np.int64), np.ones(len(members), dtype=np.int64))
        return weighted_majority_scaled(w, n * scale, self.bits[members])

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        m = self.profile.m
        if self.rule == "maj":
            return np.broadcast_to(self.fixed, (size, m))
        if self.rule == "mindist":
            return self.mixture[rng.integers(0, len(self.mixture), size=size)]
        committees = floyd_sample(rng, self.profile.n, self.k, size)
        if self.rule in ("kmaj", "rd"):
            return _probs_from_margin(2 * self.bits[committees].sum(axis=1), self.k)
        return np.array([self._krep_probs(np.sort(c)) for c in committees])

    def chunk_sums(self, seed: int, index: int, size: int):
        rng = np.random.default_rng([seed, index])
        probs = self.draw(rng, size)
        coins = rng.integers(0, 2, size=probs.shape)
        z = np.where(probs == 0.5, coins, probs).astype(np.int64)
        n = self.profile.n
        costs = np.where(z == 1, n - self.support, self.support).sum(axis=1)
        return int(costs.sum()), int((costs * costs).sum())


def mc_expected_cost(
    profile: PreferenceProfile,
    rule: str,
    k: int | None = None,
    *,
    samples: int = 10_000,
    seed: int = 0,
    threads: int = 1,
    cap: int | None = None,
) -> MCEstimate:
    """Sample mean and standard error of the realized social cost.

    Parameters
    ----------
    rule : str
        One of ``maj``, ``rd``, ``kmaj``, ``krep``, ``mindist``.
    samples : int
        Number of independent draws, at least 2.
    threads : int
        Worker threads; the result does not depend on it.
    """
    if samples < 2:
        raise ValidationError(f"samples must be >= 2, got {samples}")
    if threads < 1:
        raise ValidationError(f"threads must be >= 1, got {threads}")
    sampler = _Sampler(profile, rule, k, cap)
    size = sampler.chunk
    jobs = [(i, min(size, samples - i * size)) for i in range(math.ceil(samples / size))]

    def run(job):
        return sampler.chunk_sums(seed, *job)

    if threads == 1:
        parts = [run(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = Fraction(s1, samples)
    var = (Fraction(s2) - mean * s1) / (samples - 1)
    se = math.sqrt(float(var) / samples)
    mu = float(mean)
    return MCEstimate(mu, se, samples, (mu - 1.96 * se, mu + 1.96 * se), seed)


def mc_ratio(profile: PreferenceProfile, rule: str, k: int | None = None, **kwargs) -> tuple[MCEstimate, CostRatio]:
    """Monte Carlo mean cost over the exact optimal cost."""
    est = mc_expected_cost(profile, rule, k, **kwargs)
    return est, cost_ratio(est.mean, optimal_cost(profile))
