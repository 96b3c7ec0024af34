import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from isohazard.bootstrap import (
    EXPONENTIAL,
    NAIVE,
    SMOOTHED,
    BootstrapConfig,
    DegenerateFitError,
    IsotonicCumhazModel,
    critical_value,
    durot_calibrated_test,
    naive_isotonic_bootstrap_test,
    p_value,
    plugin_asymptotic_factors,
    plugin_integrals,
    run_test,
    smoothed_isotonic_bootstrap_test,
    transformed_right_end,
)
from isohazard.families import DFamily, WeibullModel
from isohazard.hazard import DegenerateIntervalError, IsotonicHazardFit, penalized_isotonic_hazard
from isohazard.hazard import restricted_gcm_cumhaz
from isohazard.rng import RngStream
from isohazard.smoothing import SmoothHazard, smooth_hazard
from isohazard.statistics import SUP, StatisticSpec


@pytest.fixture(scope="module")
def data():
    m = DFamily(-1.0)
    return m.sample(50, RngStream(11, 0, 0, 0)), float(m.quantile(0.95))


class TestQuantile:
    def test_single_value(self):
        assert critical_value([0.3], 0.1) == 0.3

    def test_inverted_cdf(self):
        v = np.arange(1, 11, dtype=float)
        assert critical_value(v, 0.1) == 9.0
        assert critical_value(v, 0.15) == 9.0
        assert critical_value(v, 0.05) == 10.0
        np.testing.assert_equal(critical_value(v, 0.3), np.quantile(v, 0.7, method="inverted_cdf"))

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=50), st.floats(0.01, 0.98), st.floats(0.01, 0.98))
    def test_monotone_in_level(self, vals, a1, a2):
        lo, hi = sorted((a1, a2))
        assert critical_value(vals, hi) <= critical_value(vals, lo)

    def test_p_value(self):
        assert p_value(0.5, [0.1, 0.5, 0.9]) == 3 / 4
        assert p_value(1.0, [0.1, 0.5]) == 1 / 3


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(B=0), dict(alpha=0.0), dict(alpha=1.0),
                                    dict(method="other"), dict(penalty=-1.0)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            BootstrapConfig(**kw)

    def test_defaults(self):
        cfg = BootstrapConfig()
        assert (cfg.B, cfg.alpha, cfg.method) == (2000, 0.1, SMOOTHED)
        assert cfg.bandwidth(100) == pytest.approx(100**-0.25)
        assert cfg.penalty_for(100) == pytest.approx(2 * 100 ** (-2 / 3))


@pytest.mark.parametrize("method", [SMOOTHED, NAIVE, EXPONENTIAL])
class TestEngines:
    def test_outcome_invariants(self, data, method):
        x, a = data
        out = run_test(x, a, BootstrapConfig(B=200, method=method))
        assert out.bootstrap_values.shape == (200,)
        assert out.critical_value == critical_value(out.bootstrap_values, 0.1)
        assert out.reject == (out.statistic > out.critical_value)
        assert out.p_value == p_value(out.statistic, out.bootstrap_values)
        assert 0 < out.p_value <= 1
        assert out.method == method and out.n == 50
        assert np.all(out.bootstrap_values >= 0)

    def test_deterministic(self, data, method):
        x, a = data
        cfg = BootstrapConfig(B=100, method=method, seed=5)
        o1, o2 = run_test(x, a, cfg), run_test(x, a, cfg)
        np.testing.assert_array_equal(o1.bootstrap_values, o2.bootstrap_values)
        o3 = run_test(x, a, BootstrapConfig(B=100, method=method, seed=6))
        assert not np.array_equal(o1.bootstrap_values, o3.bootstrap_values)

    def test_single_replicate(self, data, method):
        x, a = data
        out = run_test(x, a, BootstrapConfig(B=1, method=method))
        assert out.critical_value == out.bootstrap_values[0]

    def test_to_dict(self, data, method):
        x, a = data
        d = run_test(x, a, BootstrapConfig(B=10, method=method)).to_dict()
        assert len(d["bootstrap_values"]) == 10
        assert set(d) >= {"statistic", "critical_value", "p_value", "reject", "config", "seed"}


class TestSmoothed:
    def test_diagnostics(self, data):
        x, a = data
        out = smoothed_isotonic_bootstrap_test(x, a, BootstrapConfig(B=20))
        assert out.diagnostics["bandwidth"] == pytest.approx(50**-0.25)
        assert out.diagnostics["penalty"] == pytest.approx(2 * 50 ** (-2 / 3))
        assert not out.diagnostics["bandwidth_warning"]

    def test_degenerate_interval(self):
        with pytest.raises(DegenerateIntervalError):
            smoothed_isotonic_bootstrap_test([1.0, 2.0], 0.5, BootstrapConfig(B=5))

    def test_stream_is_block_of_exponentials(self, data):
        x, a = data
        s = RngStream(3, 1, 2, 1)
        out = smoothed_isotonic_bootstrap_test(x, a, BootstrapConfig(B=4), stream=s)
        cfg = BootstrapConfig(B=4)
        from isohazard.bootstrap import fit_smoothed_model
        from isohazard.statistics import t_n

        model = fit_smoothed_model(x, a, cfg)
        rows = np.sort(model.inverse_cumhaz(s.exponentials((4, 50))), axis=1)
        np.testing.assert_allclose(out.bootstrap_values, [t_n(r, (0, a)) for r in rows], atol=1e-14)


class TestNaive:
    def test_all_zero_fit(self):
        with pytest.raises(DegenerateFitError):
            naive_isotonic_bootstrap_test([1.0, 2.0], 1.0, BootstrapConfig(B=5, method=NAIVE))

    def test_model_tail(self, data):
        x, a = data
        H, _, b_eff = restricted_gcm_cumhaz(x, (0, a))
        m = IsotonicCumhazModel(H)
        e = np.linspace(0, 6, 50)
        np.testing.assert_allclose(m.cumhaz(m.inverse_cumhaz(e)), e, atol=1e-12)
        assert m.hazard(b_eff + 1) == pytest.approx(H.slopes[-1])


class TestDurot:
    def test_right_end(self):
        x = [1.0, 2.0, 3.0, 4.0]
        assert transformed_right_end(x, 2.5) == pytest.approx(math.log(4 / 2))
        assert transformed_right_end(x, 5.0) == pytest.approx(math.log(4))
        assert transformed_right_end(x, 0.5) == 0.0

    def test_default_statistic_is_sup(self, data):
        x, a = data
        out = durot_calibrated_test(x, a, BootstrapConfig(B=20, method=EXPONENTIAL))
        assert out.statistic_kind == SUP
        assert out.diagnostics["transformed_right_end"] == pytest.approx(transformed_right_end(x, a))

    def test_degenerate(self):
        with pytest.raises(DegenerateIntervalError):
            durot_calibrated_test([1.0, 2.0], 0.5, BootstrapConfig(B=5, method=EXPONENTIAL))


class TestPlugin:
    def test_constant_hazard_flagged(self):
        fit = IsotonicHazardFit(np.array([0.0, 2.0]), np.array([1.5]), 2.0, 0.0, 50)
        s = SmoothHazard(fit, 0.3)
        f = plugin_asymptotic_factors(s, (0.5, 1.5))
        assert not f.finite and math.isnan(f.mu_factor)

    def test_weibull_closed_form(self):
        # h = 2x, h' = 2, f = 2x exp(-x^2): (2 h f / h')^(1/3) = (4 x^2 exp(-x^2))^(1/3)
        m = WeibullModel(2.0, 1.0)
        f = plugin_integrals(m, 0.2, 1.5)

        def mu(x):
            return (4 * x * x * math.exp(-x * x)) ** (1 / 3) * 2 * x * math.exp(-x * x)

        def sigma(x):
            return (4 * x * x * math.exp(-x * x)) ** (4 / 3) * 2 * x * math.exp(-x * x)

        from isohazard.oracles import quadrature

        assert f.finite
        assert f.mu_factor == pytest.approx(quadrature(mu, 0.2, 1.5).value, abs=1e-6)
        assert f.sigma_factor == pytest.approx(quadrature(sigma, 0.2, 1.5).value, abs=1e-6)

    def test_mu_factor_consistency_trend(self):
        m = DFamily(1.0)
        b = float(m.quantile(0.95))
        truth = plugin_integrals(m, 0.0, b).mu_factor
        err = {}
        for n in (100, 1000):
            vals = []
            for seed in range(9):
                x = m.sample(n, RngStream(seed, n))
                s = smooth_hazard(penalized_isotonic_hazard(x, b))
                vals.append(plugin_asymptotic_factors(s, (0.0, b)).mu_factor)
            err[n] = abs(np.nanmedian(vals) / truth - 1)
        assert err[1000] < 0.10
        assert err[1000] < err[100]
