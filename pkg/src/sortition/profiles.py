"""Binary multi-issue preference profiles, their file format and generators.

A profile is an ``n x m`` 0/1 matrix: row ``i`` holds voter ``i``'s preferred
alternative on each of the ``m`` issues.  All generators are pure functions of
their arguments; randomized ones take an explicit ``seed``.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import DEFAULT_CAPS
from .errors import DimensionError, GenerationError, ProfileParseError, ResourceLimitError, ValidationError


class PreferenceProfile:
    """Immutable ``n x m`` binary preference matrix.

    Parameters
    ----------
    bits : array_like
        Two-dimensional array of 0/1 entries, one row per voter.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits):
        arr = np.asarray(bits)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise ValidationError(f"profile must be 2-dimensional, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError(f"profile needs n >= 1 and m >= 1, got shape {arr.shape}")
        if arr.dtype == bool:
            arr = arr.astype(np.uint8)
        elif not np.all((arr == 0) | (arr == 1)):
            bad = np.argwhere((arr != 0) & (arr != 1))[0]
            raise ValidationError(f"entry at row {bad[0]}, col {bad[1]} is not 0/1")
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.setflags(write=False)
        self._bits = arr

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def n(self) -> int:
        return self._bits.shape[0]

    @property
    def m(self) -> int:
        return self._bits.shape[1]

    def support(self) -> np.ndarray:
        """Number of voters holding 1, per issue."""
        return self._bits.sum(axis=0, dtype=np.int64)

    def __eq__(self, other):
        if not isinstance(other, PreferenceProfile):
            return NotImplemented
        return self._bits.shape == other._bits.shape and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self):
        return hash((self._bits.shape, self._bits.tobytes()))

    def __repr__(self):
        return f"PreferenceProfile(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class SingleIssueSpec:
    """``n`` voters of which ``n1`` prefer alternative 1 on the only issue."""

    n: int
    n1: int

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"n must be positive, got {self.n}")
        if not 0 <= self.n1 <= self.n:
            raise ValidationError(f"need 0 <= n1 <= n, got n1={self.n1}, n={self.n}")


def make_single_issue(spec: SingleIssueSpec) -> PreferenceProfile:
    """Voters ``0..n1-1`` hold 1, the rest hold 0."""
    col = np.zeros((spec.n, 1), dtype=np.uint8)
    col[: spec.n1] = 1
    return PreferenceProfile(col)


def single_issue(n: int, n1: int) -> PreferenceProfile:
    return make_single_issue(SingleIssueSpec(n, n1))


def clone_issues(profile: PreferenceProfile, copies: int) -> PreferenceProfile:
    """Repeat every issue ``copies`` times in place (issue ``j`` becomes a block)."""
    if copies < 1:
        raise ValidationError(f"copies must be >= 1, got {copies}")
    return PreferenceProfile(np.repeat(profile.bits, copies, axis=1))


def complement(profile: PreferenceProfile) -> PreferenceProfile:
    return PreferenceProfile(1 - profile.bits)


def equidistant_profile(n: int, n1: int, *, max_n: int | None = None, allow_large: bool = False) -> PreferenceProfile:
    """Permutation-indexed profile with equal pairwise distances.

    Issues are the permutations ``pi`` of ``range(n)`` in lexicographic order.
    Voter ``i`` holds 1 on issue ``pi`` iff ``pi[i] < n1``, so every issue has
    exactly ``n1`` supporters and, by symmetry under relabeling, every pair of
    distinct voters sits at the same distance
    ``n! * 2 n1 (n - n1) / (n (n - 1))``.

    Raises
    ------
    ResourceLimitError
        If ``n`` exceeds the cap (default 8) and ``allow_large`` is false.
    """
    cap = DEFAULT_CAPS.equidistant_n if max_n is None else max_n
    if n < 1:
        raise ValidationError(f"n must be positive, got {n}")
    if not 1 <= n1 <= n:
        raise ValidationError(f"need 1 <= n1 <= n, got n1={n1}, n={n}")
    if n > cap and not allow_large:
        raise ResourceLimitError(f"equidistant profile with n={n} has {math.factorial(n)} issues; cap is n <= {cap}")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int16)
    return PreferenceProfile((perms < n1).T)


def equidistant_distance(n: int, n1: int):
    """Common pairwise distance of :func:`equidistant_profile` as an exact fraction."""
    if n < 2:
        return Fraction(0)
    return Fraction(math.factorial(n) * 2 * n1 * (n - n1), n * (n - 1))


def _pairwise_hamming(bits: np.ndarray) -> np.ndarray:
    x = bits.astype(np.float64)
    ones = x.sum(axis=1)
    d = ones[:, None] + ones[None, :] - 2.0 * (x @ x.T)
    return np.rint(d).astype(np.int64)


def _two_cluster_ok(bits, size_p, p, q, epsilon):
    m = bits.shape[1]
    d = _pairwise_hamming(bits)
    to_zero = bits.sum(axis=1, dtype=np.int64)
    e_pp = 2 * p * (1 - p) * m
    e_pq = (p * (1 - q) + q * (1 - p)) * m
    lo, hi = 1 - epsilon, 1 + epsilon

    def within(values, expected):
        return values.size == 0 or bool(np.all((values >= lo * expected) & (values <= hi * expected)))

    pp = d[:size_p, :size_p][~np.eye(size_p, dtype=bool)]
    pq = d[:size_p, size_p:]
    qq = d[size_p:, size_p:]
    if not (within(pp, e_pp) and within(pq, e_pq) and bool(np.all(qq == 0))):
        return False
    if not (within(to_zero[:size_p], p * m) and within(to_zero[size_p:], q * m)):
        return False
    # delegation argument needs every P-P pair strictly farther apart than any P-Q pair
    return pp.size == 0 or pp.min() > pq.max()


def two_cluster_profile(
    n: int,
    m: int,
    alpha: float,
    p: float,
    q: float,
    epsilon: float,
    seed: int,
    *,
    max_attempts: int | None = None,
) -> PreferenceProfile:
    """Diffuse cluster ``P`` plus a unanimous cluster ``Q``.

    The first ``round(alpha * n)`` rows form ``P`` with i.i.d. Bernoulli(p)
    entries; the remaining rows all copy one Bernoulli(q) vector.  Draws are
    rejected until every distance among voters and to the zero vector lies
    within ``1 +- epsilon`` of its expectation and every P-P distance exceeds
    every P-Q distance.
    """
    if not 0 < q < p < 0.5:
        raise ValidationError(f"need 0 < q < p < 1/2, got p={p}, q={q}")
    if not 0 < alpha < 1:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
    if epsilon <= 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon}")
    if n < 2 or m < 1:
        raise ValidationError(f"need n >= 2 and m >= 1, got n={n}, m={m}")
    size_p = int(round(alpha * n))
    if not 1 <= size_p <= n - 1:
        raise ValidationError(f"alpha={alpha} leaves an empty cluster for n={n}")
    attempts = DEFAULT_CAPS.two_cluster_attempts if max_attempts is None else max_attempts
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        diffuse = rng.random((size_p, m)) < p
        shared = rng.random(m) < q
        bits = np.vstack([diffuse, np.broadcast_to(shared, (n - size_p, m))]).astype(np.uint8)
        if _two_cluster_ok(bits, size_p, p, q, epsilon):
            return PreferenceProfile(bits)
    raise GenerationError(
        f"no two-cluster profile met the distance concentration within {attempts} attempts; try a larger m"
    )


def two_cluster_report(profile: PreferenceProfile, size_p: int, p: float, q: float) -> dict:
    """Realized-over-expected distance ranges for a two-cluster profile."""
    m = profile.m
    d = _pairwise_hamming(profile.bits)
    pp = d[:size_p, :size_p][~np.eye(size_p, dtype=bool)]
    pq = d[:size_p, size_p:]
    zero = profile.bits.sum(axis=1, dtype=np.int64)
    e_pp = 2 * p * (1 - p) * m
    e_pq = (p * (1 - q) + q * (1 - p)) * m
    rep = {
        "size_p": size_p,
        "size_q": profile.n - size_p,
        "pp_over_expected": [float(pp.min() / e_pp), float(pp.max() / e_pp)] if pp.size else None,
        "pq_over_expected": [float(pq.min() / e_pq), float(pq.max() / e_pq)],
        "p_to_zero_over_expected": [float(zero[:size_p].min() / (p * m)), float(zero[:size_p].max() / (p * m))],
        "q_to_zero_over_expected": float(zero[size_p] / (q * m)),
    }
    rep["separated"] = bool(pp.size == 0 or pp.min() > pq.max())
    return rep


def iid_issue_profile(n: int, m: int, p: float, seed: int) -> PreferenceProfile:
    """Entries i.i.d. Bernoulli(p)."""
    if not 0 <= p <= 1:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    return PreferenceProfile(rng.random((n, m)) < p)


def write_profile(profile: PreferenceProfile, path) -> None:
    lines = [f"{profile.n},{profile.m}"]
    lines.extend(",".join("1" if b else "0" for b in row) for row in profile.bits)
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def read_profile(path) -> PreferenceProfile:
    """Parse the CSV profile format: header ``n,m`` then ``n`` rows of ``m`` digits."""
    try:
        text = Path(path).read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ProfileParseError(f"profile file is not UTF-8: {exc}") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ProfileParseError("empty profile file")
    header = lines[0].split(",")
    if len(header) != 2 or not all(h.isdigit() for h in header):
        raise ProfileParseError(f"bad header {lines[0]!r}; expected 'n,m'")
    n, m = int(header[0]), int(header[1])
    if n < 1 or m < 1:
        raise ProfileParseError(f"header declares n={n}, m={m}; both must be positive")
    rows = lines[1:]
    if len(rows) != n:
        raise DimensionError(f"header declares n={n} voters but file has {len(rows)} rows")
    bits = np.empty((n, m), dtype=np.uint8)
    for i, line in enumerate(rows):
        cells = line.split(",")
        if len(cells) != m:
            raise DimensionError(f"row {i} has {len(cells)} cells, header declares m={m}")
        for j, cell in enumerate(cells):
            if cell == "0":
                bits[i, j] = 0
            elif cell == "1":
                bits[i, j] = 1
            else:
                raise ProfileParseError(f"invalid cell {cell!r}", row=i, col=j)
    return PreferenceProfile(bits)
