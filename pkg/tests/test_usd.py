"""Unambiguous state discrimination formulas and the loss threshold."""

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lossjm import usd


def p_d_reference(n, r, dps=50):
    """Direct evaluation of the alternating sum in 50-digit arithmetic."""
    with mpmath.workdps(dps):
        vals = []
        for t in range(1, n + 1):
            s = mpmath.mpf(0)
            for j in range(1, n + 1):
                w = mpmath.e ** (2j * mpmath.pi * j / n)
                s += mpmath.e ** (2j * mpmath.pi * j * t / n) * mpmath.e ** (
                    mpmath.mpf(r) ** 2 * (w - 1)
                )
            assert abs(mpmath.im(s)) < mpmath.mpf(10) ** (-dps + 10)
            vals.append(float(mpmath.re(s)))
    return min(vals)


class TestPd:
    def test_two_states_analytic(self):
        r = 0.1
        assert usd.p_d(2, r) == pytest.approx(1 - math.exp(-2 * r * r), abs=1e-14)
        assert usd.p_d(2, r) == pytest.approx(0.0198013, abs=1e-7)

    def test_indistinguishable_limit(self):
        for n in (2, 3, 5):
            assert usd.p_d(n, 0.0) == 0.0
            assert usd.p_d(n, 1e-9) < 1e-8

    def test_against_extended_precision_reference(self):
        assert usd.p_d(4, 0.05) == pytest.approx(p_d_reference(4, 0.05), abs=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    @pytest.mark.parametrize("r", [0.05, 0.3, 1.0])
    def test_series_matches_reference(self, n, r):
        ref = p_d_reference(n, r)
        assert usd.p_d(n, r) == pytest.approx(min(1.0, max(0.0, ref)), rel=1e-10, abs=1e-13)

    def test_series_and_direct_agree_at_moderate_r(self):
        for n in (2, 3, 4):
            for r in (0.05, 0.2, 0.8):
                assert usd.p_d(n, r) == pytest.approx(
                    usd.p_d(n, r, method="direct"), rel=1e-9, abs=1e-12
                )

    def test_direct_loses_accuracy_below_crossover(self):
        # the alternating sum cancels catastrophically for r ~ 1e-3, n >= 4;
        # the series route stays accurate (reason it is the default)
        n, r = 5, 1e-3
        exact = p_d_reference(n, r)
        series_err = abs(usd.p_d(n, r) - exact)
        assert series_err < 1e-25
        direct_err = abs(usd.p_d(n, r, method="direct") - exact)
        assert direct_err > 1e3 * max(series_err, 1e-300)

    def test_clamped_to_unit_interval(self):
        for n in (2, 3, 4):
            for r in (2.0, 5.0):
                assert 0.0 <= usd.p_d(n, r) <= 1.0

    @given(st.integers(2, 6), st.floats(0.0, 1.5))
    @settings(max_examples=60, deadline=None)
    def test_probability_range(self, n, r):
        assert 0.0 <= usd.p_d(n, r) <= 1.0


class TestApproximations:
    def test_p_d_approx_values(self):
        assert usd.p_d_approx(2, 0.01) == pytest.approx(2e-4, rel=1e-12)
        assert usd.p_d_approx(3, 0.01) == pytest.approx(1.5e-8, rel=1e-12)

    def test_p_d_ratio_approaches_one(self):
        assert usd.p_d(2, 0.01) == pytest.approx(1 - math.exp(-2e-4), abs=1e-14)
        for n in (2, 3, 4):
            ratio = usd.p_d(n, 1e-3) / usd.p_d_approx(n, 1e-3)
            assert abs(ratio - 1) < 0.01

    def test_p_lon_ratio_approaches_one(self):
        for n in (2, 3, 4, 5):
            ratio = usd.p_lon(n, 1e-3) / usd.p_lon_approx(n, 1e-3)
            assert abs(ratio - 1) < 0.01

    def test_n2_forms_coincide(self):
        # 2! = 2^1, so both small-r forms agree for two states
        assert usd.p_d_approx(2, 0.01) == usd.p_lon_approx(2, 0.01)


class TestPLon:
    def test_two_states_optimal(self):
        for r in (0.01, 0.1, 0.5, 1.0):
            assert abs(usd.p_lon(2, r) - usd.p_d(2, r)) < 1e-12

    def test_three_states_value(self):
        # |e^{2 pi i k/3} - 1|^2 = 3 for both factors
        expect = (1 - math.exp(-0.25)) ** 2
        assert usd.p_lon(3, 0.5) == pytest.approx(expect, rel=1e-12)
        assert usd.p_lon(3, 0.5) == pytest.approx(0.0489291, abs=1e-6)

    def test_zero_amplitude(self):
        for n in (2, 4, 7):
            assert usd.p_lon(n, 0.0) == 0.0

    def test_never_beats_optimum(self):
        for n in range(2, 7):
            for r in np.linspace(0.01, 1.0, 12):
                assert usd.p_lon(n, r) <= usd.p_d(n, r) + 1e-12

    def test_strictly_suboptimal_beyond_two(self):
        for n in (3, 4, 5):
            assert usd.p_lon(n, 0.3) < usd.p_d(n, 0.3)


class TestRootDistanceProduct:
    @pytest.mark.parametrize("n", [3, 5])
    def test_small_cases(self, n):
        assert usd.root_distance_product(n) == pytest.approx(n * n, abs=1e-10)

    def test_identity_up_to_twenty(self):
        for n in range(2, 21):
            assert abs(usd.root_distance_product(n) - n * n) < 1e-9


class TestLossySuccess:
    def test_scaling_with_balanced_split(self):
        # at tau_b = 1/n the product reproduces the split-and-detect formula
        n, r = 3, 0.1
        assert usd.lossy_usd_success(n, r, 1.0 / n) == pytest.approx(
            usd.p_lon(n, r), rel=1e-12
        )

    def test_zero_amplitude(self):
        assert usd.lossy_usd_success(4, 0.0, 0.5) == 0.0

    def test_small_r_form(self):
        n, r, tau = 3, 1e-3, 0.5
        expect = n * n * r ** (2 * (n - 1)) * tau ** (n - 1)
        assert usd.lossy_usd_success(n, r, tau) == pytest.approx(expect, rel=0.01)


class TestThreshold:
    def test_half(self):
        # 2! = 2 fails the strict comparison against 2^1, 3! = 6 beats 2^2
        assert not usd.beats_no_loss_optimum(2, 0.5)
        assert usd.beats_no_loss_optimum(3, 0.5)
        assert usd.result4_threshold(0.5) == 3

    def test_quarter(self):
        # 6! = 720 < 4^5 = 1024 while 7! = 5040 > 4^6 = 4096
        assert Fraction(math.factorial(6)) * Fraction(0.25) ** 5 < 1
        assert Fraction(math.factorial(7)) * Fraction(0.25) ** 6 > 1
        assert usd.result4_threshold(0.25) == 7

    def test_lossless(self):
        assert usd.result4_threshold(1.0) == 2

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            usd.result4_threshold(0.0)

    @pytest.mark.parametrize("tau", [0.9, 0.5, 0.25, 0.1])
    def test_contradiction_exhibited(self, tau):
        # at the threshold the lossy split-and-detect small-r form strictly
        # exceeds the no-loss optimum's small-r form:
        # n^2 r^{2(n-1)} tau^{n-1} > n^2 r^{2(n-1)} / n!  iff  n! tau^{n-1} > 1
        n = usd.result4_threshold(tau)
        assert Fraction(math.factorial(n)) * Fraction(tau) ** (n - 1) > 1
        assert not Fraction(math.factorial(n - 1)) * Fraction(tau) ** (n - 2) > 1 or n == 2
        r = 1e-3
        lossy = usd.lossy_usd_success(n, r, tau)
        assert lossy > usd.p_d_approx(n, r)


class TestReport:
    def test_report_fields(self):
        rep = usd.usd_report(3, 0.01, 0.5)
        d = rep.as_dict()
        assert d["threshold_n"] == 3
        assert d["beats_optimum"] is True
        assert 0 <= d["p_lon"] <= d["p_d"] + 1e-12
