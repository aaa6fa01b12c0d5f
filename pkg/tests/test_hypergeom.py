"""Double-precision hypergeometric evaluators against exact and high-precision oracles."""

import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from sortition import hypergeom


def mp_pmf(q, n, K, k):
    with mpmath.workdps(40):
        return mpmath.binomial(K, q) * mpmath.binomial(n - K, k - q) / mpmath.binomial(n, k)


def test_exact_pmf_small():
    assert hypergeom.exact_pmf(1, 5, 2, 2) == Fraction(3, 5)
    assert hypergeom.exact_pmf(0, 5, 0, 3) == 1
    assert hypergeom.exact_pmf(3, 5, 2, 3) == 0


@pytest.mark.parametrize("n", [1001, 5000, 20000, 100000])
def test_pmf_relative_error_large_n(n):
    rng = random.Random(n)
    worst = 0.0
    for _ in range(150):
        K = rng.randint(0, n)
        k = rng.randint(1, n)
        lo, hi = max(0, k - (n - K)), min(K, k)
        mode = (k + 1) * (K + 1) // (n + 2)
        q = min(max(lo, mode + rng.randint(-200, 200)), hi)
        ref = mp_pmf(q, n, K, k)
        if ref < mpmath.mpf("1e-300"):
            continue
        got = float(hypergeom.pmf(q, n, K, k))
        worst = max(worst, float(abs(got - ref) / ref))
    assert worst <= 1e-12


def test_pmf_normalization_up_to_1e5():
    for n, K, k in [(50, 17, 9), (1000, 300, 77), (20000, 9000, 501), (100000, 22571, 3), (100000, 40000, 2001)]:
        q = np.arange(0, k + 1)
        assert abs(hypergeom.pmf(q, n, K, k).sum() - 1.0) <= 1e-12


@given(st.integers(1, 60).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n), st.integers(1, n))))
def test_pmf_matches_exact(args):
    n, K, k = args
    for q in range(k + 1):
        exact = float(hypergeom.exact_pmf(q, n, K, k))
        got = float(hypergeom.pmf(q, n, K, k))
        assert got == pytest.approx(exact, rel=1e-12, abs=0)


def test_infeasible_is_zero():
    assert hypergeom.pmf(4, 10, 3, 5) == 0.0
    assert hypergeom.pmf(0, 10, 8, 5) == 0.0


@pytest.mark.parametrize("n", [1, 2, 3, 7, 30, 101])
def test_selects_one_table_matches_exact(n):
    ks = np.arange(1, n + 1)
    table = hypergeom.selects_one_table(n, ks)
    for K in range(n + 1):
        for k in ks:
            assert table[K, k - 1] == pytest.approx(float(hypergeom.exact_selects_one(n, K, int(k))), abs=1e-13)


def test_selects_one_table_large_n_against_mpmath():
    n = 30000
    ks = [3, 4, 51, 500]
    K = [0, 1, 6772, 14999, 15000]
    table = hypergeom.selects_one_table(n, ks, 15000)
    for j, k in enumerate(ks):
        for KK in K:
            with mpmath.workdps(40):
                ref = sum(
                    (1 if 2 * q > k else mpmath.mpf(1) / 2 if 2 * q == k else 0) * mp_pmf(q, n, KK, k)
                    for q in range(max(0, k - (n - KK)), min(KK, k) + 1)
                )
            assert table[KK, j] == pytest.approx(float(ref), abs=1e-12)


def test_selects_one_direct_sum_agrees_with_table():
    n = 5000
    table = hypergeom.selects_one_table(n, [7, 8], 2500)
    for K in (0, 3, 1000, 2499, 2500):
        assert hypergeom.selects_one(n, K, 7) == pytest.approx(table[K, 0], abs=1e-13)
        assert hypergeom.selects_one(n, K, 8) == pytest.approx(table[K, 1], abs=1e-13)


@given(st.integers(2, 40).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n), st.integers(1, n // 2))))
def test_even_committee_matches_preceding_odd(args):
    n, K, h = args
    assert hypergeom.exact_selects_one(n, K, 2 * h) == hypergeom.exact_selects_one(n, K, 2 * h - 1)


def test_stirling_remainder_against_mpmath():
    xs = list(range(1, 200)) + [500, 501, 5000, 10**5]
    with mpmath.workdps(50):
        ref = [
            float(mpmath.loggamma(x + 1) - (x + mpmath.mpf(1) / 2) * mpmath.log(x) + x - mpmath.log(2 * mpmath.pi) / 2)
            for x in xs
        ]
    got = hypergeom._stirlerr(np.array(xs, dtype=float))
    # absolute error is what enters the log mass
    assert np.max(np.abs(got - np.array(ref))) <= 2e-16
    assert hypergeom._stirlerr(0.0) == 0.0
