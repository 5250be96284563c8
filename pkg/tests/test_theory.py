"""Closed-form math: normal helpers, moments, bounds, GDP adjustments.

Frozen constants in this module come from an mpmath oracle run; scipy serves
as an independent in-test oracle for the hand-rolled normal helpers.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats as sstats
from scipy.special import log_ndtr

from bntrace.bn import NetworkStructure, complexity
from bntrace.errors import ValidationError
from bntrace import theory
from bntrace.theory import (
    bound_auc,
    bound_curve,
    bound_power,
    default_alpha_grid,
    gdp_delta,
    gdp_power_cap,
    log_normal_cdf,
    lr_moments,
    naive_bayes_variance,
    normal_cdf,
    normal_quantile,
)


class TestNormalHelpers:
    def test_cdf_symmetry_point(self):
        assert normal_cdf(0.0) == 0.5

    def test_cdf_known_value(self):
        assert normal_cdf(1.4702) == pytest.approx(0.9292462026395478, abs=1e-12)

    def test_cdf_matches_scipy_within_contract(self):
        xs = np.linspace(-8.0, 8.0, 2001)
        ours = np.array([normal_cdf(x) for x in xs])
        assert np.max(np.abs(ours - sstats.norm.cdf(xs))) <= 1e-7

    def test_quantile_matches_scipy_within_contract(self):
        ps = np.concatenate(
            [
                np.geomspace(1e-12, 0.4, 400),
                np.linspace(0.4, 0.6, 100),
                1.0 - np.geomspace(1e-12, 0.4, 400),
            ]
        )
        ours = np.array([normal_quantile(p) for p in ps])
        assert np.max(np.abs(ours - sstats.norm.ppf(ps))) <= 1e-7

    def test_mutually_inverse(self):
        assert normal_quantile(normal_cdf(0.7)) == pytest.approx(0.7, abs=1e-6)

    @given(st.floats(min_value=1e-10, max_value=1.0 - 1e-10))
    def test_round_trip_property(self, p):
        assert normal_cdf(normal_quantile(p)) == pytest.approx(p, abs=1e-9)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.25, 1.5])
    def test_quantile_domain(self, p):
        with pytest.raises(ValidationError):
            normal_quantile(p)

    def test_log_cdf_deep_tail(self):
        for x in (-5.0, -20.0, -37.0, -40.0, -100.0, -300.0):
            assert log_normal_cdf(x) == pytest.approx(float(log_ndtr(x)), rel=1e-10)


class TestMoments:
    def test_known_profile(self):
        profile = lr_moments(446, 3000)
        assert profile.mu0 == pytest.approx(0.0743333333, abs=1e-9)
        assert profile.var0 == pytest.approx(0.1486666667, abs=1e-9)
        assert profile.mu1 == -profile.mu0
        assert profile.var1 == profile.var0

    def test_zero_complexity(self):
        profile = lr_moments(0, 50)
        assert (profile.mu0, profile.mu1, profile.var0, profile.var1) == (0, 0, 0, 0)

    @given(st.floats(min_value=0, max_value=5000), st.integers(min_value=1, max_value=10**6))
    def test_signs_and_symmetry(self, c, n):
        profile = lr_moments(c, n)
        assert profile.mu0 == -profile.mu1 == c / (2 * n)
        assert profile.var0 == profile.var1 == c / n
        assert math.isfinite(profile.var0)

    def test_validation(self):
        with pytest.raises(ValidationError):
            lr_moments(-1, 100)
        with pytest.raises(ValidationError):
            lr_moments(10, 0)


class TestBoundPower:
    def test_blind_attacker(self):
        for alpha in (0.01, 0.2, 0.5, 0.9):
            assert bound_power(0, 100, alpha) == pytest.approx(alpha, abs=1e-9)

    def test_unit_separation(self):
        assert bound_power(1000, 1000, 0.5) == pytest.approx(0.8413447460685429, abs=1e-9)

    def test_monotone_in_complexity(self):
        values = [bound_power(c, 500, 0.1) for c in (0, 50, 200, 1000, 5000)]
        assert all(a < b for a, b in zip(values, values[1:]))

    @given(
        st.floats(min_value=0.0, max_value=5.0),
        st.integers(min_value=1, max_value=10**5),
        st.floats(min_value=1e-3, max_value=1 - 1e-3),
    )
    def test_tradeoff_identity(self, ratio, n, alpha):
        c = ratio * n
        beta = bound_power(c, n, alpha)
        # z-quantile form: the member-side quantile enters at level beta.
        assert normal_quantile(1 - alpha) + normal_quantile(beta) == pytest.approx(
            math.sqrt(c / n), abs=1e-6
        )


class TestBoundAuc:
    def test_known_values(self):
        assert bound_auc(446, 3000) == pytest.approx(0.60743556, abs=1e-7)
        assert bound_auc(1000, 1000) == pytest.approx(0.76024994, abs=1e-7)

    def test_no_leakage(self):
        assert bound_auc(0, 10) == 0.5

    def test_consistent_with_power_integral(self):
        c, n = 800, 1000
        grid = np.linspace(0.0, 1.0, 10_001)
        betas = np.empty_like(grid)
        betas[0], betas[-1] = 0.0, 1.0
        for i in range(1, grid.size - 1):
            betas[i] = bound_power(c, n, grid[i])
        integral = float(np.trapezoid(betas, grid))
        assert integral == pytest.approx(bound_auc(c, n), abs=1e-4)

    def test_edgeless_binary_recovery(self):
        # Independent-attribute special case: C equals the attribute count and
        # the separation is sqrt(m/n) exactly.
        m, n = 30, 400
        structure = NetworkStructure((2,) * m, ((),) * m)
        c = complexity(structure)
        assert c == m
        for alpha in (0.05, 0.3):
            beta = bound_power(c, n, alpha)
            assert normal_quantile(1 - alpha) + normal_quantile(beta) == pytest.approx(
                math.sqrt(m / n), abs=1e-9
            )


class TestBoundCurve:
    def test_grid_defaults(self):
        grid = default_alpha_grid()
        assert grid.size == 200
        assert grid[0] == pytest.approx(1e-3)
        assert grid[-1] == 1.0
        assert np.all(np.diff(grid) > 0)

    def test_endpoints_and_dominance(self):
        curve = bound_curve(300, 1000)
        assert curve.betas[-1] == 1.0
        assert np.all(curve.betas >= curve.alphas - 1e-12)
        assert np.all(np.diff(curve.betas) >= 0)

    def test_gdp_cap_is_pointwise_minimum(self):
        c, n, mu = 900, 1000, 0.4
        capped = bound_curve(c, n, gdp_mu=mu)
        plain = bound_curve(c, n)
        for a, b in zip(capped.alphas[:-1], capped.betas[:-1]):
            if a == 0.0:
                continue
            expected = min(bound_power(c, n, a), gdp_power_cap(mu, a))
            assert b == pytest.approx(expected, abs=1e-12)
        assert capped.auc <= plain.auc

    def test_auc_matches_numeric_integral_with_cap(self):
        curve = bound_curve(900, 1000, gdp_mu=0.4)
        grid = np.linspace(0.0, 1.0, 20_001)
        betas = np.empty_like(grid)
        betas[0], betas[-1] = 0.0, 1.0
        for i in range(1, grid.size - 1):
            betas[i] = min(bound_power(900, 1000, grid[i]), gdp_power_cap(0.4, grid[i]))
        assert curve.auc == pytest.approx(float(np.trapezoid(betas, grid)), abs=2e-4)

    def test_rejects_bad_grid(self):
        with pytest.raises(ValidationError):
            bound_curve(10, 100, alphas=np.array([0.5, 0.5, 0.7]))
        with pytest.raises(ValidationError):
            bound_curve(10, 100, alphas=np.array([0.2, 1.4]))


class TestNaiveBayesVariance:
    def test_known_value(self):
        assert naive_bayes_variance(10, 100, 0.25) == pytest.approx(29 / 150, abs=1e-12)

    def test_balanced_marginal_is_exact_ratio(self):
        for m, n in ((1, 10), (10, 100), (37, 541)):
            assert naive_bayes_variance(m, n, 0.5) == (2 * m - 1) / n

    @given(
        st.integers(min_value=1, max_value=500),
        st.integers(min_value=1, max_value=10**5),
        st.floats(min_value=1e-3, max_value=1 - 1e-3),
    )
    def test_correction_nonnegative(self, m, n, p1):
        assert naive_bayes_variance(m, n, p1) >= (2 * m - 1) / n - 1e-15

    @pytest.mark.parametrize("p1", [0.0, 1.0, -0.1, 1.1])
    def test_marginal_domain(self, p1):
        with pytest.raises(ValidationError):
            naive_bayes_variance(10, 100, p1)


class TestGdp:
    def test_delta_at_zero_epsilon(self):
        assert gdp_delta(0.0, 1.0) == pytest.approx(0.3829249225480263, abs=1e-12)

    def test_delta_vanishes_at_large_epsilon(self):
        assert gdp_delta(40.0, 1.0) < 1e-12

    def test_delta_monotone_in_epsilon(self):
        for mu in (0.3, 1.0, 3.0):
            eps = np.linspace(0.0, 10.0, 1000)
            deltas = np.array([gdp_delta(e, mu) for e in eps])
            assert np.all(np.diff(deltas) <= 1e-12)

    @given(
        st.floats(min_value=0.0, max_value=50.0),
        st.floats(min_value=1e-3, max_value=10.0),
    )
    def test_delta_in_unit_interval(self, eps, mu):
        assert 0.0 <= gdp_delta(eps, mu) <= 1.0

    def test_delta_domain(self):
        with pytest.raises(ValidationError):
            gdp_delta(1.0, 0.0)
        with pytest.raises(ValidationError):
            gdp_delta(-1.0, 1.0)

    def test_cap_perfect_privacy(self):
        for alpha in (0.01, 0.1, 0.5):
            assert gdp_power_cap(0.0, alpha) == pytest.approx(alpha, abs=1e-9)

    def test_cap_known_value(self):
        assert gdp_power_cap(1.0, 0.05) == pytest.approx(0.2595110228414441, abs=1e-9)

    def test_cap_monotone_in_mu(self):
        caps = [gdp_power_cap(mu, 0.05) for mu in (0.0, 0.5, 1.0, 2.0, 5.0)]
        assert all(a < b for a, b in zip(caps, caps[1:]))

    def test_cap_domain(self):
        with pytest.raises(ValidationError):
            gdp_power_cap(-0.5, 0.1)
