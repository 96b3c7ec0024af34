import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isohazard.hazard import DegenerateIntervalError
from isohazard.oracles import durot_grid, tn_bruteforce
from isohazard.statistics import (
    INTEGRAL,
    SUP,
    StatisticSpec,
    durot_batch,
    durot_stat,
    statistic,
    statistic_batch,
    t_n,
    t_n_batch,
)

samples = st.lists(st.floats(0.01, 10.0), min_size=2, max_size=60, unique=True)


class TestFixtures:
    def test_convex_cusum_is_zero(self):
        assert t_n([1, 2], (0, 2.5)) == 0.0

    def test_three_points(self):
        want = (1 / 3) * (1 / 3 - (1 - math.exp(-0.2 * math.log(3) / 1.9)))
        assert t_n([1, 1.2, 3], (0, 2.9)) == pytest.approx(want, abs=1e-12)
        assert want == pytest.approx(0.0747, abs=1e-4)

    def test_durot_convex(self):
        assert durot_stat([1, 2], (0, 2.5)) == pytest.approx(math.log(2))

    def test_degenerate(self):
        with pytest.raises(DegenerateIntervalError):
            t_n([1, 2], (2.5, 3.0))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            StatisticSpec("other")
        with pytest.raises(ValueError):
            StatisticSpec(INTEGRAL, 0.5)


class TestAgainstOracles:
    @given(samples, st.floats(0.0, 2.0), st.floats(0.5, 10.0),
           st.sampled_from([1.0, 2.0, 3.5, math.inf]))
    def test_tn_bruteforce(self, xs, a, width, p):
        try:
            v = t_n(xs, (a, a + width), p)
        except DegenerateIntervalError:
            return
        assert v == pytest.approx(tn_bruteforce(xs, (a, a + width), p), abs=1e-10)

    def test_durot_grid(self, rng):
        for _ in range(20):
            x = np.sort(rng.weibull(0.8, 40))
            b = float(np.quantile(x, 0.9))
            exact = durot_stat(x, (0, b))
            approx = durot_grid(x, (0, b), points=20_000)
            # the grid can only miss the supremum, by at most one hull slope times the spacing
            assert approx <= exact + 1e-12
            assert exact - approx < 0.05

    @given(samples, st.floats(0.0, 2.0), st.floats(0.5, 10.0))
    def test_batch_matches_scalar(self, xs, a, width):
        x = np.sort(xs)
        iv = (a, a + width)
        for spec in (StatisticSpec(INTEGRAL, 1.0), StatisticSpec(INTEGRAL, 2.0),
                     StatisticSpec(INTEGRAL, math.inf), StatisticSpec(SUP)):
            got = statistic_batch(x[None, :], iv, spec)[0]
            try:
                want = statistic(x, iv, spec)
            except DegenerateIntervalError:
                assert math.isnan(got)
                continue
            assert got == pytest.approx(want, abs=1e-12)

    def test_batch_with_ties(self):
        x = np.array([0.5, 1.0, 1.0, 1.0, 2.0, 3.0])
        # the integral over dF_n weights a tied point by its multiplicity
        assert t_n_batch(x[None], (0, 2.5))[0] == pytest.approx(tn_bruteforce(x, (0, 2.5)), abs=1e-12)
        assert durot_batch(x[None], (0, 2.5))[0] == pytest.approx(durot_stat(x, (0, 2.5)), abs=1e-12)


class TestProperties:
    @given(samples, st.floats(0.5, 10.0))
    def test_nonnegative_and_monotone_in_p(self, xs, b):
        try:
            vals = [t_n(xs, (0, b), p) for p in (1.0, 1.5, 2.0, 4.0)]
        except DegenerateIntervalError:
            return
        assert all(v >= 0 for v in vals)
        assert all(v2 <= v1 + 1e-15 for v1, v2 in zip(vals, vals[1:]))

    @given(samples, st.floats(0.5, 10.0), st.floats(0.1, 20.0))
    def test_durot_scale_invariance(self, xs, b, c):
        x = np.asarray(xs)
        try:
            v = durot_stat(x, (0, b))
        except DegenerateIntervalError:
            return
        assert durot_stat(c * x, (0, c * b)) == pytest.approx(v, abs=1e-9)

    def test_pmax_is_max_term(self):
        x = [1, 1.2, 3]
        assert t_n(x, (0, 2.9), math.inf) == pytest.approx(3 * t_n(x, (0, 2.9), 1.0))

    def test_batch_shape_check(self):
        with pytest.raises(ValueError):
            t_n_batch(np.ones(5), (0, 1))
