"""Hypergeometric probabilities in double precision.

The pointwise mass uses Loader's saddle-point decomposition (Stirling-series
remainders plus the ``bd0`` deviance term), which keeps the relative error near
machine precision for populations far beyond the range where big-integer
binomials are cheap.  The table routines evaluate, for every success count
``K`` at once, the probability that a uniformly random ``k``-subset has a
strict or tied majority of successes.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

_LN_2PI = math.log(2.0 * math.pi)
# log(x!) - log(sqrt(2 pi x) (x/e)^x) at x = 0..15, correctly rounded
_STIRLERR_TABLE = np.array(
    [
        0.0,
        0.08106146679532726,
        0.0413406959554093,
        0.02767792568499834,
        0.020790672103765093,
        0.016644691189821193,
        0.013876128823070748,
        0.01189670994589177,
        0.010411265261972096,
        0.009255462182712733,
        0.00833056343336287,
        0.007573675487951841,
        0.00694284010720953,
        0.006408994188004207,
        0.0059513701127588475,
        0.005554733551962801,
    ]
)


def _stirlerr(x):
    """``log(x!) - log(sqrt(2 pi x) (x/e)^x)`` for integer-valued ``x >= 0``."""
    x = np.asarray(x, dtype=np.float64)
    small = x <= 15
    idx = np.clip(x, 0, 15).astype(np.int64)
    xs = np.where(small, 16.0, x)
    nn = xs * xs
    s0, s1, s2, s3, s4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188
    big = np.where(
        xs > 500,
        (s0 - s1 / nn) / xs,
        np.where(
            xs > 80,
            (s0 - (s1 - s2 / nn) / nn) / xs,
            np.where(
                xs > 35,
                (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / xs,
                (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / xs,
            ),
        ),
    )
    return np.where(small, _STIRLERR_TABLE[idx], big)


def _bd0(x, mu):
    """Deviance term ``x log(x/mu) + mu - x`` evaluated without cancellation."""
    x = np.asarray(x, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    total = x + mu
    close = np.abs(x - mu) < 0.1 * total
    safe_total = np.where(total > 0, total, 1.0)
    v = (x - mu) / safe_total
    s = (x - mu) * v
    ej = 2.0 * x * v
    v2 = v * v
    for j in range(1, 14):
        ej = ej * v2
        s = s + ej / (2 * j + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        far = x * np.log(np.where(x > 0, x, 1.0) / np.where(mu > 0, mu, 1.0)) + mu - x
    return np.where(close, s, far)


def _log_dbinom_raw(x, n, p, q):
    """Log binomial mass at ``x`` for ``n`` trials, ``p + q = 1`` supplied separately."""
    x, n, p, q = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64) for a in (x, n, p, q)))
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = (x > 0) & (x < n)
        xs = np.where(inner, x, 1.0)
        ns = np.where(inner, n, 2.0)
        lc = _stirlerr(ns) - _stirlerr(xs) - _stirlerr(ns - xs) - _bd0(xs, ns * p) - _bd0(ns - xs, ns * q)
        lf = _LN_2PI + np.log(xs) + np.log1p(-xs / ns)
        general = lc - 0.5 * lf

        at_zero = np.where(p < 0.1, -_bd0(n, n * q) - n * p, n * np.log(np.where(q > 0, q, 1.0)))
        at_n = np.where(q < 0.1, -_bd0(n, n * p) - n * q, n * np.log(np.where(p > 0, p, 1.0)))

    out = np.where(inner, general, -np.inf)
    out = np.where(x == n, at_n, out)
    out = np.where(x == 0, np.where(n == 0, 0.0, at_zero), out)
    out = np.where((x < 0) | (x > n), -np.inf, out)
    out = np.where(p == 0, np.where(x == 0, 0.0, -np.inf), out)
    out = np.where(q == 0, np.where(x == n, 0.0, -np.inf), out)
    return out


def log_pmf(q, n, K, k):
    """Log of ``C(K, q) C(n-K, k-q) / C(n, k)``; ``-inf`` where infeasible."""
    q, n, K, k = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64) for a in (q, n, K, k)))
    white = n - K
    feasible = (q >= 0) & (q <= K) & (k - q >= 0) & (k - q <= white) & (k <= n) & (k >= 0)
    ns = np.where(n > 0, n, 1.0)
    p = k / ns
    pc = (n - k) / ns
    val = _log_dbinom_raw(q, K, p, pc) + _log_dbinom_raw(k - q, white, p, pc) - _log_dbinom_raw(k, n, p, pc)
    val = np.where(k == 0, np.where(q == 0, 0.0, -np.inf), val)
    return np.where(feasible, val, -np.inf)


def pmf(q, n, K, k):
    return np.exp(log_pmf(q, n, K, k))


def exact_pmf(q: int, n: int, K: int, k: int) -> Fraction:
    if q < 0 or q > K or k - q < 0 or k - q > n - K:
        return Fraction(0)
    return Fraction(math.comb(K, q) * math.comb(n - K, k - q), math.comb(n, k))


def exact_selects_one(n: int, K: int, k: int) -> Fraction:
    """``Pr(xi > k/2) + Pr(xi = k/2) / 2`` for ``xi ~ Hypergeometric(n, K, k)``, exactly."""
    total = 0
    half = 0
    for q in range(max(0, k - (n - K)), min(K, k) + 1):
        w = math.comb(K, q) * math.comb(n - K, k - q)
        if 2 * q > k:
            total += w
        elif 2 * q == k:
            half += w
    return Fraction(2 * total + half, 2 * math.comb(n, k))


def selects_one(n: int, K: int, k: int) -> float:
    """Double precision version of :func:`exact_selects_one` (direct tail sum)."""
    qs = np.arange(max(0, k - (n - K)), min(K, k) + 1)
    if qs.size == 0:
        return 0.0
    probs = pmf(qs, n, K, k)
    weights = np.where(2 * qs > k, 1.0, np.where(2 * qs == k, 0.5, 0.0))
    return float(np.sum(probs * weights))


def _log_pmf_along_K(N: int, q, kk, K_max: int) -> np.ndarray:
    """``log pmf(q_l; N, K, kk_l)`` with one row per column ``l`` and ``K = 0..K_max`` along the row.

    Starts from ``K = q`` and walks up with the exact mass ratio
    ``pmf(K+1)/pmf(K) = (K+1)(N-K-kk+q) / ((K+1-q)(N-K))``.  Rows are
    contiguous so the running sums stream through memory.
    """
    q = np.asarray(q, dtype=np.int64)
    kk = np.asarray(kk, dtype=np.int64)
    L = q.shape[0]
    if K_max == 0:
        return log_pmf(q, N, 0, kk)[:, None]
    with np.errstate(divide="ignore"):
        log_int = np.log(np.arange(N + 2, dtype=np.float64))
    K = np.arange(K_max, dtype=np.int64)
    qc = q[:, None]
    cs = np.zeros((L, K_max + 1))
    step = cs[:, 1:]
    step += log_int[K + 1] - log_int[N - K]
    # row l reads log(K + 1 - q_l) and log(N - kk_l + q_l - K): shifted slices of one table
    pad = K_max + 1
    rising = log_int[np.clip(np.arange(-pad, N + 2 + pad), 1, N + 1)]
    step -= sliding_window_view(rising, K_max)[1 - q + pad]
    falling = log_int[np.clip(-np.arange(-(N + 1) - pad, K_max + pad), 0, N + 1)]
    step += sliding_window_view(falling, K_max)[-(N - kk + q) + N + 1 + pad]
    # K < q rows of the walk contribute nothing; no -inf can occur there
    step[K < qc] = 0.0
    np.cumsum(step, axis=1, out=step)
    reachable = q <= K_max
    qi = np.where(reachable, q, 0)
    shift = log_pmf(q, N, q, kk) - cs[np.arange(L), qi]
    cs += shift[:, None]
    cs[(np.arange(K_max + 1) < qc) | ~reachable[:, None]] = -np.inf
    return cs


def selects_one_table(n: int, ks, K_max: int | None = None) -> np.ndarray:
    """``Pr(committee majority picks 1)`` for ``K = 0..K_max`` supporters (rows) and each ``k``."""
    return selects_one_rows(n, ks, K_max).T


def selects_one_rows(n: int, ks, K_max: int | None = None) -> np.ndarray:
    """Row-major form of :func:`selects_one_table`: one row per ``k``, ``K = 0..K_max`` along it.

    Strict-majority mass uses the coupling identity
    ``Pr_{K+1}(xi >= s) - Pr_K(xi >= s) = (k/n) pmf(s-1; n-1, K, k-1)``
    (the extra supporter matters only when drawn and exactly at the threshold);
    the tie half-mass for even ``k`` is added directly.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=np.int64))
    if K_max is None:
        K_max = n
    s = ks // 2 + 1
    strict = np.zeros((ks.size, K_max + 1))
    if n == 1:
        strict[:, 1:] = 1.0
    elif K_max > 0:
        inc = _log_pmf_along_K(n - 1, s - 1, ks - 1, K_max - 1)
        np.exp(inc, out=inc)
        inc *= (ks / n)[:, None]
        np.cumsum(inc, axis=1, out=strict[:, 1:])
    even = ks % 2 == 0
    if np.any(even):
        tie = np.exp(_log_pmf_along_K(n, ks[even] // 2, ks[even], K_max))
        strict[even] += 0.5 * tie
    np.clip(strict, 0.0, 1.0, out=strict)
    return strict
