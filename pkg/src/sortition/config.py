"""Size caps and thresholds that switch between evaluation strategies."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError


@dataclass(frozen=True)
class Caps:
    """Resource caps.

    Attributes
    ----------
    enumeration : int
        Largest number of committees (or committee compositions) an exact
        enumeration may visit.
    exact_binomial_n : int
        Populations up to this size use big-integer binomials; larger ones use
        the saddle-point double precision evaluator.
    equidistant_n : int
        Largest voter count accepted by the permutation-indexed generator.
    two_cluster_attempts : int
        Rejection-sampling budget of the two-cluster generator.
    tie_tolerance : float
        Relative tolerance for declaring a weighted tie when weights are floats.
    """

    enumeration: int = 10**6
    exact_binomial_n: int = 1000
    equidistant_n: int = 8
    two_cluster_attempts: int = 1000
    tie_tolerance: float = 1e-12


DEFAULT_CAPS = Caps()


def load_caps(path: str | Path | None) -> Caps:
    """Read a JSON object of cap overrides; unknown keys are rejected."""
    if path is None:
        return DEFAULT_CAPS
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValidationError("caps config must be a JSON object")
    known = {f.name for f in dataclasses.fields(Caps)}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown caps keys: {sorted(unknown)}")
    return dataclasses.replace(DEFAULT_CAPS, **data)
