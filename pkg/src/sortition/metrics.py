"""Hamming distance, social cost, the optimal outcome and cost ratios."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

from .errors import ValidationError
from .profiles import PreferenceProfile, _pairwise_hamming


def _as_outcome(z, m=None) -> np.ndarray:
    arr = np.asarray(z)
    if arr.ndim != 1:
        raise ValidationError(f"outcome vector must be 1-dimensional, got shape {arr.shape}")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValidationError("outcome vector entries must be 0 or 1")
    if m is not None and arr.shape[0] != m:
        raise ValidationError(f"outcome has length {arr.shape[0]}, profile has m={m}")
    return arr.astype(np.int64)


def hamming(z, z2) -> int:
    a, b = _as_outcome(z), _as_outcome(z2)
    if a.shape != b.shape:
        raise ValidationError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return int(np.abs(a - b).sum())


def social_cost(profile: PreferenceProfile, z) -> int:
    """Total number of voter-issue disagreements with outcome ``z``."""
    zz = _as_outcome(z, profile.m)
    support = profile.support()
    return int(np.where(zz == 1, profile.n - support, support).sum())


def expected_social_cost(profile: PreferenceProfile, probs) -> float:
    """Expected social cost of an issue-product distribution with ``Pr[z_j = 1] = probs[j]``."""
    pr = np.asarray(probs, dtype=np.float64)
    if pr.shape != (profile.m,):
        raise ValidationError(f"probability vector has shape {pr.shape}, expected ({profile.m},)")
    support = profile.support()
    return float(np.sum(pr * (profile.n - support) + (1.0 - pr) * support))


def optimal_outcome(profile: PreferenceProfile) -> tuple[np.ndarray, int]:
    """Issue-wise population majority; exact ties are reported as 0.

    Returns the outcome vector and its social cost
    ``sum_j min(n1_j, n - n1_j)``, which does not depend on the tie convention.
    """
    support = profile.support()
    z = (2 * support > profile.n).astype(np.uint8)
    return z, int(np.minimum(support, profile.n - support).sum())


def optimal_cost(profile: PreferenceProfile) -> int:
    return optimal_outcome(profile)[1]


def distance_matrix(profile: PreferenceProfile) -> np.ndarray:
    """``n x n`` matrix of pairwise Hamming distances between voters."""
    return _pairwise_hamming(profile.bits)


@dataclass(frozen=True)
class CostRatio:
    """Expected cost over optimal cost with ``0/0 = 1`` and ``C/0 = inf``.

    ``value`` is ``math.inf`` exactly when :attr:`is_infinite` is true; JSON
    output spells it as the string ``"inf"``.
    """

    numerator: Real
    denominator: Real

    @property
    def is_infinite(self) -> bool:
        return self.denominator == 0 and self.numerator > 0

    @property
    def value(self):
        if self.denominator == 0:
            return math.inf if self.numerator > 0 else 1
        if isinstance(self.numerator, (int, Fraction)) and isinstance(self.denominator, (int, Fraction)):
            return Fraction(self.numerator) / Fraction(self.denominator)
        return float(self.numerator) / float(self.denominator)

    def __float__(self):
        return float(self.value)

    def to_dict(self) -> dict:
        return {
            "num": float(self.numerator),
            "den": float(self.denominator),
            "value": "inf" if self.is_infinite else float(self.value),
        }


def cost_ratio(expected_cost, optimal_cost) -> CostRatio:
    if expected_cost < 0 or optimal_cost < 0:
        raise ValidationError(f"costs must be nonnegative, got {expected_cost}, {optimal_cost}")
    return CostRatio(expected_cost, optimal_cost)
