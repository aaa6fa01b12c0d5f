import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sortition import bounds as b
from sortition.errors import ValidationError
from sortition.exact_eval import ar_one_issue_kmaj, kmaj_expected_cost_exact
from sortition.hypergeom import exact_selects_one
from sortition.profiles import single_issue


def _trapezoid_cdf(x, step=1e-4):
    # integrate the density from -12, where the remaining mass is below 1e-32
    grid = np.arange(-12.0, x + step / 2, step)
    dens = np.exp(-grid**2 / 2) / math.sqrt(2 * math.pi)
    return float(np.sum((dens[1:] + dens[:-1]) / 2) * step)


def test_normal_cdf_against_quadrature():
    for x in np.round(np.arange(-6, 6.0001, 0.5), 2):
        assert b.normal_cdf(float(x)) == pytest.approx(_trapezoid_cdf(float(x)), abs=1e-7)
    assert b.normal_cdf(-1.0) == pytest.approx(0.158655, abs=1e-6)


def test_normal_cdf_grid_monotone_and_symmetric():
    xs = np.arange(-6, 6.005, 0.01)
    vals = np.array([b.normal_cdf(float(x)) for x in xs])
    assert np.all(np.diff(vals) > 0)
    assert np.allclose(vals + vals[::-1], 1.0, atol=1e-15)


class TestKmajBounds:
    def test_values(self):
        assert b.kmaj_upper_bound(1) == pytest.approx(4.6392, abs=1e-4)
        assert b.kmaj_upper_bound(9) == pytest.approx(2.2131, abs=1e-4)
        assert b.kmaj_lower_bound(100) == pytest.approx(1.011731, abs=1e-6)
        assert b.kmaj_lower_bound(4) < 1

    def test_limit_constant(self):
        ratio, frac = b.kmaj3_exact_limit()
        assert ratio == pytest.approx(1.315565, abs=1e-6) and frac == pytest.approx(0.22571, abs=1e-5)

    def test_applicability(self):
        assert b.lower_bound_applies(32, 3) and not b.lower_bound_applies(31, 3)

    @pytest.mark.parametrize("k", [0, -3])
    def test_invalid(self, k):
        with pytest.raises(ValidationError):
            b.kmaj_upper_bound(k)

    @given(st.integers(1, 10**6))
    def test_lower_below_upper(self, k):
        assert b.kmaj_lower_bound(k) < b.kmaj_upper_bound(k)


class TestWeightedBounds:
    def test_one_issue_values(self):
        assert b.krep_one_issue_ar(1, exact=True) == 2
        assert b.krep_one_issue_ar(2, exact=True) == Fraction(9, 8)
        assert b.krep_one_issue_ar(3, exact=True) == Fraction(28, 27)

    def test_one_issue_decreasing_and_below_kmaj_upper(self):
        vals = [b.krep_one_issue_ar(k, exact=True) for k in range(1, 80)]
        assert all(x > y for x, y in zip(vals, vals[1:]))
        assert all(float(v) < b.kmaj_upper_bound(k) for k, v in enumerate(vals, start=1))

    def test_iid_values(self):
        assert b.krep_iid_upper_bound(1, 10) == pytest.approx(1 + math.exp(-5))
        assert b.krep_iid_upper_bound(2, 64) == pytest.approx(1 + 8 * math.exp(-4))
        assert b.krep_iid_intermediate_bound(2, 64) == pytest.approx(1 + 16 * math.exp(-4))

    @given(st.integers(1, 6), st.integers(1, 500))
    def test_unsimplified_form_is_tighter_from_three_issues(self, m, k):
        if m >= 3:
            assert b.krep_iid_intermediate_bound(m, k) <= b.krep_iid_upper_bound(m, k)

    def test_two_cluster_curve(self):
        value, alpha = b.krep_many_issue_lower()
        assert b.two_cluster_curve(alpha, 1) == value == Fraction(9, 8)
        grid = np.linspace(0, 1, 4001)
        assert grid[np.argmax(b.two_cluster_curve(grid, 1))] == pytest.approx(0.75)
        assert b.two_cluster_curve(0.75, 60) == pytest.approx(1.5, abs=1e-6)
        with pytest.raises(ValidationError):
            b.two_cluster_curve(1.5, 2)


class TestBoundReport:
    def test_upper_and_lower(self):
        up = b.BoundReport("u", {"k": 3}, 2.0, "upper")
        assert up.satisfied is None
        assert up.compare(1.9).satisfied and not up.compare(2.1).satisfied
        low = b.BoundReport("l", {}, 1.0, "lower", compared_to=1.0)
        assert low.satisfied
        assert low.to_dict()["side"] == "lower"

    def test_bad_side(self):
        with pytest.raises(ValidationError):
            b.BoundReport("x", {}, 1.0, "middle")


def test_ar_rows():
    rows = b.ar_rows(50, [3, 1, 3])
    assert [r["k"] for r in rows] == [1, 3]
    assert rows[0]["ar"] == pytest.approx(2 - 2 / 50) and rows[0]["worst_n1"] == 1
    assert all(r["upper_satisfied"] for r in rows)
    assert rows[1]["lower_applies"] and rows[1]["lower_satisfied"]


def test_bounds_rows_order():
    rows = b.bounds_rows([4, 1], [2, 1])
    assert [(r["k"], r["m"]) for r in rows] == [(1, 1), (1, 2), (4, 1), (4, 2)]
    with pytest.raises(ValidationError):
        b.bounds_rows([], [1])


class TestRegret:
    def test_formula(self):
        assert b.regret(10, 7, 0.5, 3, 2) == 6
        with pytest.raises(ValidationError):
            b.regret(1, 1, 0, 1, 1)

    @pytest.mark.parametrize("n,k", [(12, 1), (12, 4), (15, 7)])
    def test_worst_regret_against_exact(self, n, k):
        c = 0.25
        brute = max(
            float(kmaj_expected_cost_exact(single_issue(n, n1), k, exact=True).expected_cost) - min(n1, n - n1)
            for n1 in range(n + 1)
        )
        assert b.worst_one_issue_regret(n, [k], c)[0] == pytest.approx(brute + c * k, abs=1e-12)

    def test_extremes(self):
        assert b.optimal_k_scan(21, 1e6, range(1, 22))[0] == 1
        assert b.optimal_k_scan(21, 1e-9, range(1, 22))[0] == 21

    def test_ties_pick_smaller_k(self):
        # with no excess anywhere only the elicitation term matters
        best, rows = b.optimal_k_scan(1, 1.0, [1])
        assert best == 1 and rows == [{"n": 1, "k": 1, "regret": 1.0}]

    def test_invalid_grid(self):
        with pytest.raises(ValidationError):
            b.worst_one_issue_regret(10, [11], 1.0)
        with pytest.raises(ValidationError):
            b.worst_one_issue_regret(10, [], 1.0)

    def test_scaling_report_fields(self):
        rep = b.regret_scaling_check(100, 0.05, range(1, 801, 2))
        assert rep["n"] == [100, 800] and rep["expected"] == pytest.approx(4.0)
        assert rep["consistent"] == (2.8 <= rep["ratio"] <= 5.8)
