import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import profiles, random_profile
from sortition import exact_eval as ev
from sortition.errors import ResourceLimitError, ValidationError
from sortition.metrics import expected_social_cost, optimal_cost, social_cost
from sortition.profiles import (
    PreferenceProfile,
    clone_issues,
    complement,
    equidistant_profile,
    iid_issue_profile,
    single_issue,
)
from sortition.rules import Committee, committee_majority_probs, krep_outcome_probs, maj_outcome_probs


class TestHypergeomParams:
    @pytest.mark.parametrize("n,K,k", [(0, 0, 1), (5, 6, 2), (5, -1, 2), (5, 2, 0), (5, 2, 6)])
    def test_invalid(self, n, K, k):
        with pytest.raises(ValidationError):
            ev.HypergeomParams(n, K, k)


def test_pmf_examples():
    assert ev.hypergeom_pmf(ev.HypergeomParams(5, 2, 2), 1) == pytest.approx(0.6)
    assert ev.hypergeom_pmf(ev.HypergeomParams(5, 2, 2), 1, exact=True) == Fraction(3, 5)
    assert ev.hypergeom_pmf(ev.HypergeomParams(5, 0, 3), 0) == 1
    params = ev.HypergeomParams(50, 17, 9)
    assert sum(ev.hypergeom_pmf(params, q, exact=True) for q in range(10)) == 1


def test_pmf_switches_to_double_precision_above_cap():
    params = ev.HypergeomParams(1500, 400, 30)
    exact = float(ev.hypergeom_pmf(params, 8, exact=True))
    assert ev.hypergeom_pmf(params, 8) == pytest.approx(exact, rel=1e-12)
    assert ev.hypergeom_pmf(params, 8, exact_n=2000) == pytest.approx(exact, rel=1e-15)


def test_selects_one_examples():
    assert ev.p_committee_selects_one(ev.HypergeomParams(4, 2, 3)) == 0.5
    assert ev.p_committee_selects_one(ev.HypergeomParams(9, 0, 5)) == 0
    assert ev.p_committee_selects_one(ev.HypergeomParams(6, 3, 2), exact=True) == Fraction(1, 2)


@given(st.integers(1, 40).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))))
def test_selects_one_nondecreasing_in_K(args):
    n, k = args
    vals = [ev.p_committee_selects_one(ev.HypergeomParams(n, K, k), exact=True) for K in range(n + 1)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


@given(st.integers(1, 30).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n), st.integers(1, n))))
def test_variance_matches_enumeration(args):
    n, K, k = args
    params = ev.HypergeomParams(n, K, k)
    pm = [ev.hypergeom_pmf(params, q, exact=True) for q in range(k + 1)]
    mean = sum(q * p for q, p in enumerate(pm))
    var = sum((q - mean) ** 2 * p for q, p in enumerate(pm))
    assert mean == Fraction(k * K, n)
    assert var == ev.hypergeom_variance(params)


class TestKmajExact:
    def test_full_committee_is_majority(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            p = random_profile(rng, int(rng.integers(1, 9)), 4)
            rep = ev.kmaj_expected_cost_exact(p, p.n, exact=True)
            assert rep.expected_cost == Fraction(expected_social_cost(p, maj_outcome_probs(p))).limit_denominator(2)

    def test_tied_issue(self):
        rep = ev.kmaj_expected_cost_exact(single_issue(4, 2), 3)
        assert rep.expected_cost == 2 and rep.ratio.value == 1 and rep.method == "exact-hypergeometric"

    def test_single_dictator(self):
        rep = ev.kmaj_expected_cost_exact(single_issue(10, 1), 1, exact=True)
        assert rep.expected_cost == Fraction(9, 5) and rep.ratio.value == Fraction(9, 5)

    def test_k_too_large(self):
        with pytest.raises(ValidationError):
            ev.kmaj_expected_cost_exact(single_issue(3, 1), 4)

    def test_json(self):
        d = json.loads(json.dumps(ev.kmaj_expected_cost_exact(single_issue(10, 1), 1).to_dict()))
        assert set(d) == {"expected_cost", "optimal_cost", "ratio", "method", "detail"}
        assert d["ratio"]["value"] == pytest.approx(1.8)

    @given(profiles(max_n=9, max_m=4), st.integers(1, 6), st.data())
    def test_cloning_leaves_ratio_unchanged(self, p, c, data):
        k = data.draw(st.integers(1, p.n))
        a = ev.kmaj_expected_cost_exact(p, k, exact=True).ratio.value
        b = ev.kmaj_expected_cost_exact(clone_issues(p, c), k, exact=True).ratio.value
        assert a == b

    @given(profiles(max_n=9, max_m=4), st.data())
    def test_complement_symmetry(self, p, data):
        k = data.draw(st.integers(1, p.n))
        a = ev.kmaj_expected_cost_exact(p, k, exact=True)
        b = ev.kmaj_expected_cost_exact(complement(p), k, exact=True)
        assert a.expected_cost == b.expected_cost and a.ratio.value == b.ratio.value


def _krep_by_committee_loop(p, k):
    """Independent path: Fraction delegation weights per committee through the generic weighted majority."""
    total = Fraction(0)
    combos = list(itertools.combinations(range(p.n), k))
    for members in combos:
        probs = krep_outcome_probs(p, members)
        total += Fraction(expected_social_cost(p, probs)).limit_denominator(2)
    return total / len(combos)


def _kmaj_by_committee_loop(p, k):
    total = Fraction(0)
    combos = list(itertools.combinations(range(p.n), k))
    for members in combos:
        probs = committee_majority_probs(p, Committee(members))
        total += Fraction(expected_social_cost(p, probs)).limit_denominator(2)
    return total / len(combos)


class TestEnumeration:
    @settings(max_examples=80)
    @given(profiles(max_n=8, max_m=5), st.data())
    def test_kmaj_all_routes_agree(self, p, data):
        k = data.draw(st.integers(1, p.n))
        closed = ev.kmaj_expected_cost_exact(p, k, exact=True).expected_cost
        assert ev.enumerate_expected_cost(p, k, "kmaj", scheme="committees").expected_cost == closed
        assert ev.enumerate_expected_cost(p, k, "kmaj", scheme="types").expected_cost == closed
        assert _kmaj_by_committee_loop(p, k) == closed

    @settings(max_examples=80)
    @given(profiles(max_n=8, max_m=5), st.data())
    def test_krep_schemes_match_loop(self, p, data):
        k = data.draw(st.integers(1, p.n))
        ref = _krep_by_committee_loop(p, k)
        assert ev.enumerate_expected_cost(p, k, "krep", scheme="committees").expected_cost == ref
        assert ev.enumerate_expected_cost(p, k, "krep", scheme="types").expected_cost == ref

    def test_krep_overflow_fallback_matches(self, monkeypatch):
        rng = np.random.default_rng(8)
        cases = [(random_profile(rng, int(rng.integers(2, 8)), 3), None) for _ in range(15)]
        expected = []
        for p, _ in cases:
            k = max(1, p.n // 2)
            expected.append((p, k, ev.enumerate_expected_cost(p, k, "krep", scheme="committees").expected_cost))
        monkeypatch.setattr(ev, "_INT64_SAFE", 2)
        for p, k, val in expected:
            assert ev.enumerate_expected_cost(p, k, "krep", scheme="committees").expected_cost == val
            assert ev.enumerate_expected_cost(p, k, "krep", scheme="types").expected_cost == val

    def test_krep_full_committee_is_population_majority(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            p = random_profile(rng, int(rng.integers(1, 8)), 4)
            rep = ev.enumerate_expected_cost(p, p.n, "krep")
            assert float(rep.expected_cost) == pytest.approx(expected_social_cost(p, maj_outcome_probs(p)))

    def test_unanimous_is_free(self):
        p = PreferenceProfile(np.tile([0, 1, 1], (6, 1)))
        for rule in ("kmaj", "krep"):
            rep = ev.enumerate_expected_cost(p, 3, rule)
            assert rep.expected_cost == 0 and rep.ratio.value == 1

    def test_cap(self):
        p = iid_issue_profile(30, 40, 0.5, 1)
        with pytest.raises(ResourceLimitError):
            ev.enumerate_expected_cost(p, 10, "krep", cap=1000)

    def test_auto_prefers_types(self):
        rep = ev.enumerate_expected_cost(single_issue(60, 20), 3, "krep")
        assert rep.detail["scheme"] == "types" and rep.detail["visited"] == 4

    def test_rejects_other_rules(self):
        with pytest.raises(ValidationError):
            ev.enumerate_expected_cost(single_issue(4, 1), 2, "maj")

    def test_composition_count(self):
        counts = [3, 1, 2]
        brute = sum(1 for c in itertools.product(*(range(x + 1) for x in counts)) if sum(c) == 3)
        assert ev.count_compositions(counts, 3) == brute == len(ev._compositions(counts, 3))


class TestOneIssueAR:
    @pytest.mark.parametrize("n", [3, 10, 57])
    def test_dictator(self, n):
        r, n1 = ev.ar_one_issue_kmaj(n, 1, exact=True)
        assert r == 2 - Fraction(2, n) and n1 == 1

    def test_three_member_constant(self):
        r, n1 = ev.ar_one_issue_kmaj(30000, 3)
        assert abs(r - 1.316) <= 1e-2
        assert abs(n1 / 30000 - (4 - math.sqrt(7)) / 6) <= 0.01

    @pytest.mark.parametrize("n", [1, 3, 9, 21])
    def test_full_odd_committee(self, n):
        assert ev.ar_one_issue_kmaj(n, n) == (1.0, 0)

    @pytest.mark.parametrize("n", range(1, 41))
    def test_float_scan_matches_exact(self, n):
        ratios, worst = ev.ar_one_issue_kmaj_many(n, range(1, n + 1))
        for k in range(1, n + 1):
            r, w = ev.ar_one_issue_kmaj(n, k, exact=True)
            assert ratios[k - 1] == pytest.approx(float(r), abs=1e-13)
            assert worst[k - 1] == w

    @pytest.mark.parametrize("n", [7, 64, 333, 1200])
    def test_parity_shortcut_matches_direct(self, n):
        ks = np.arange(1, n + 1)
        a, wa = ev.ar_one_issue_kmaj_many(n, ks)
        b, wb = ev.ar_one_issue_kmaj_many(n, ks, parity_shortcut=False)
        assert np.max(np.abs(a - b)) <= 1e-12 and np.array_equal(wa, wb)

    def test_matches_generic_evaluation(self):
        n, k = 25, 5
        worst = max(
            (ev.kmaj_expected_cost_exact(single_issue(n, n1), k, exact=True).ratio.value, n1) for n1 in range(0, n + 1)
        )
        r, n1 = ev.ar_one_issue_kmaj(n, k, exact=True)
        assert r == worst[0]


class TestOptimalityKernel:
    def test_example(self):
        assert ev.optimal_issue_wise_thresholds(10, 3, 3) == (0, 0, 1, 1)

    def test_symmetric_point_is_free(self):
        assert ev.optimal_issue_wise_thresholds(8, 4, 2)[1] == ev.FREE

    def test_single_member(self):
        for n in range(2, 12):
            for n1 in range(1, n // 2 + 1):
                h = ev.optimal_issue_wise_thresholds(n, n1, 1)
                assert h == (0, 1) or 2 * n1 == n

    def test_scan_has_no_deviations(self):
        rep = ev.optimality_check(30, 9)
        assert rep["deviations"] == []

    def test_deviation_detection(self):
        assert ev.majority_deviations(10, 3, 3, (0, 1, 1, 1)) == [{"n": 10, "n1": 3, "k": 3, "q": 1, "h": 1}]

    def test_invalid(self):
        with pytest.raises(ValidationError):
            ev.optimal_issue_wise_thresholds(10, 6, 3)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_against_equidistant_profile_enumeration(self, n):
        # slope of SC(X) + SC(X') in h_q, measured by counting committee columns on the real profiles
        for n1 in range(1, n // 2 + 1):
            X = equidistant_profile(n, n1)
            Xc = complement(X)
            for k in range(1, n + 1):
                slope = [0] * (k + 1)
                for members in itertools.combinations(range(n), k):
                    for prof in (X, Xc):
                        q = prof.bits[list(members)].sum(axis=0)
                        s = prof.support()
                        for qj, sj in zip(q.tolist(), s.tolist()):
                            slope[qj] += (n - sj) - sj
                expected = tuple(0 if v > 0 else 1 if v < 0 else ev.FREE for v in slope)
                assert ev.optimal_issue_wise_thresholds(n, n1, k) == expected


class TestPermutationAverage:
    @given(profiles(max_n=6, max_m=3), st.data())
    def test_kmaj_is_anonymous(self, p, data):
        k = data.draw(st.integers(1, p.n))
        rule = lambda q: ev.kmaj_expected_cost_exact(q, k, exact=True).expected_cost
        assert ev.permutation_average_cost(p, rule) == rule(p)

    @settings(max_examples=25)
    @given(profiles(max_n=6, max_m=3), st.data())
    def test_krep_is_anonymous(self, p, data):
        k = data.draw(st.integers(1, p.n))
        rule = lambda q: ev.enumerate_expected_cost(q, k, "krep").expected_cost
        assert ev.permutation_average_cost(p, rule) == rule(p)

    def test_single_voter(self):
        p = PreferenceProfile([[1, 0, 1]])
        assert ev.permutation_average_cost(p, lambda q: 7) == 7

    def test_dictator_is_not_anonymous(self):
        p = PreferenceProfile([[1, 1], [0, 0], [0, 1]])
        dictator = lambda q: social_cost(q, q.bits[0])
        avg = ev.permutation_average_cost(p, dictator)
        assert avg != dictator(p)
        assert avg == Fraction(sum(social_cost(p, row) for row in p.bits), 3)

    def test_sampled_permutations(self):
        p = iid_issue_profile(9, 3, 0.4, 2)
        rule = lambda q: ev.kmaj_expected_cost_exact(q, 3).expected_cost
        assert ev.permutation_average_cost(p, rule, samples=20, seed=1) == pytest.approx(rule(p))

    def test_samples_validated(self):
        with pytest.raises(ValidationError):
            ev.permutation_average_cost(single_issue(3, 1), lambda q: 0, samples=0)


def test_expected_cost_dispatch():
    p = iid_issue_profile(7, 4, 0.4, 3)
    assert ev.expected_cost(p, "rd").method == "exact-closed-form"
    assert ev.expected_cost(p, "kmaj", 3).method == "exact-hypergeometric"
    assert ev.expected_cost(p, "krep", 3).method == "exact-enumeration"
    assert ev.expected_cost(p, "mindist", 3).detail["committees"] >= 1
    with pytest.raises(ValidationError):
        ev.expected_cost(p, "kmaj")
    with pytest.raises(ValidationError):
        ev.expected_cost(p, "nope", 2)


@pytest.mark.parametrize("n", [10, 31, 60])
def test_two_member_weighted_rule_closed_form(n):
    # a mixed pair sends every voter to its own side, so only a pure minority pair loses
    for n1 in range(1, n // 2 + 1):
        expected = n1 + Fraction(math.comb(n1, 2), math.comb(n, 2)) * (n - 2 * n1)
        assert ev.enumerate_expected_cost(single_issue(n, n1), 2, "krep").expected_cost == expected
