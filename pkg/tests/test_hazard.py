import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isohazard.hazard import (
    DegenerateIntervalError,
    Interval,
    SampleError,
    as_sample,
    default_penalty,
    ecdf,
    empirical_cumhaz,
    fhat_from_cumhaz,
    penalized_isotonic_hazard,
    restricted_gcm_cumhaz,
)
from isohazard.gcm import PiecewiseLinearFn

samples = st.lists(st.floats(0.01, 10.0), min_size=2, max_size=40, unique=True)


class TestSample:
    @pytest.mark.parametrize("bad, msg", [
        ([1.0], "at least 2"),
        ([1.0, -1.0], "positive"),
        ([1.0, 0.0], "positive"),
        ([1.0, np.nan], "finite"),
    ])
    def test_invalid(self, bad, msg):
        with pytest.raises(SampleError, match=msg):
            as_sample(bad)

    def test_sorted(self):
        np.testing.assert_array_equal(as_sample([3, 1, 2]), [1, 2, 3])

    @pytest.mark.parametrize("a, b", [(1, 1), (2, 1), (-1, 1)])
    def test_bad_interval(self, a, b):
        with pytest.raises(ValueError):
            Interval(a, b)


class TestEcdf:
    def test_values(self):
        F = ecdf([1, 2])
        assert F(1.5) == 0.5
        assert F.left_limit(1) == 0.0
        assert F(2) == 1.0
        assert ecdf([1, 1.2, 3]).value_at_left(1.2) == pytest.approx(1 / 3)

    @given(samples)
    def test_left_limit_below_value(self, xs):
        F = ecdf(xs)
        x = np.sort(xs)
        assert np.all(F.left_limit(x) <= F(x))
        np.testing.assert_allclose(F.left_limit(x), np.arange(len(x)) / len(x))


class TestCumhaz:
    def test_values(self):
        H = empirical_cumhaz([1, 2])
        assert H.left_limit(2) == pytest.approx(math.log(2))
        assert H(0.5) == 0.0
        assert H(2) == math.inf
        assert H(1.5) == pytest.approx(math.log(2))

    @given(samples)
    def test_matches_definition(self, xs):
        H = empirical_cumhaz(xs)
        F = ecdf(xs)
        x = np.sort(xs)[:-1]
        np.testing.assert_allclose(H(x), -np.log1p(-F(x)), rtol=1e-12)


class TestRestrictedGcm:
    def test_convex_case(self):
        H, a, b_eff = restricted_gcm_cumhaz([1, 2], (0, 2.5))
        assert b_eff == 2.0 and a == 0.0
        np.testing.assert_allclose(np.array(H.knots), [(0, 0), (1, 0), (2, math.log(2))])

    def test_pooled_case(self):
        H, _, _ = restricted_gcm_cumhaz([1, 1.2, 3], (0, 2.9))
        np.testing.assert_allclose(np.array(H.knots), [(0, 0), (1, 0), (2.9, math.log(3))])
        assert H(1.2) == pytest.approx(0.1156, abs=1e-4)

    def test_degenerate(self):
        with pytest.raises(DegenerateIntervalError):
            restricted_gcm_cumhaz([1, 2], (2.0, 3.0))
        with pytest.raises(DegenerateIntervalError):
            restricted_gcm_cumhaz([1, 2], (1.2, 1.5))

    def test_observation_at_left_end_counts(self):
        H, a, b_eff = restricted_gcm_cumhaz([1, 2, 3], (1.0, 1.5))
        assert (a, b_eff) == (1.0, 1.5)

    @given(samples, st.floats(0.0, 3.0), st.floats(0.5, 12.0))
    def test_minorant_and_touching(self, xs, a, width):
        x = np.sort(xs)
        try:
            H, a, b_eff = restricted_gcm_cumhaz(x, (a, a + width))
        except DegenerateIntervalError:
            return
        n = x.size
        inside = x[(x > a) & (x <= b_eff)]
        left = math.log(n) - np.log(n - np.searchsorted(x, inside, side="left"))
        assert np.all(H(inside) <= left + 1e-12)
        for kx, ky in H.knots:
            kleft = math.log(n) - math.log(n - np.searchsorted(x, kx, side="left"))
            assert ky == pytest.approx(kleft, abs=1e-12)
        assert H.domain == (a, b_eff)


class TestFhat:
    @pytest.mark.parametrize("h, want", [(0.0, 0.0), (math.log(2), 0.5), (0.1156, 0.10917)])
    def test_values(self, h, want):
        H = PiecewiseLinearFn([0, 1], [h, h + 1])
        assert fhat_from_cumhaz(H, 0.0) == pytest.approx(want, abs=1e-5)


class TestPenalizedFit:
    def test_default_penalty(self):
        assert default_penalty(100) == pytest.approx(0.0928, abs=1e-4)

    def test_zero_penalty_matches_restricted_gcm(self, rng):
        x = np.sort(rng.exponential(size=40))
        a = float(np.quantile(x, 0.9))
        fit = penalized_isotonic_hazard(x, a, penalty=0.0)
        H, _, _ = restricted_gcm_cumhaz(x, (0.0, a))
        np.testing.assert_allclose(fit.cumhaz()(H.knots_x), H.knots_y, atol=1e-12)

    def test_two_point_sample(self):
        fit = penalized_isotonic_hazard([1, 2], 2.5, penalty=0.0)
        np.testing.assert_allclose(fit.breakpoints, [0, 1, 2])
        np.testing.assert_allclose(fit.levels, [0, math.log(2)])
        assert fit.a_eff == 2.0

    @given(samples, st.floats(0.5, 5.0))
    def test_invariants(self, xs, a):
        x = np.sort(xs)
        if not np.any(x < min(a, x[-1])):
            return
        fit = penalized_isotonic_hazard(x, a)
        assert np.all(np.diff(fit.levels) >= -1e-12)
        assert fit.levels[0] > 0
        t, mass = fit.atoms()
        assert t[0] == 0.0 and np.all(mass >= -1e-12)

    def test_scaling(self, rng):
        x = np.sort(rng.exponential(size=30))
        c = 3.0
        f1 = penalized_isotonic_hazard(x, 1.5)
        f2 = penalized_isotonic_hazard(c * x, c * 1.5)
        np.testing.assert_allclose(f2.breakpoints, c * f1.breakpoints, rtol=1e-12)
        np.testing.assert_allclose(f2.levels, f1.levels / c, rtol=1e-10)

    def test_degenerate(self):
        with pytest.raises(DegenerateIntervalError):
            penalized_isotonic_hazard([2.0, 3.0], 1.0)

    def test_left_continuous_levels(self):
        fit = penalized_isotonic_hazard([1, 2], 2.5, penalty=0.0)
        assert fit(1.0) == 0.0 and fit(1.0 + 1e-9) == pytest.approx(math.log(2))
