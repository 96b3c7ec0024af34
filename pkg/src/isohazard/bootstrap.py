"""Critical values and p-values for the monotone-hazard tests.

Three calibration engines share one outcome type:

* ``smoothed_isotonic`` resamples from the kernel-smoothed penalized
  isotonic hazard (the default for the integral statistic);
* ``naive_isotonic`` resamples from the unpenalized isotonic cumulative
  hazard itself, without smoothing;
* ``exponential_durot`` compares with standard exponential samples on the
  transformed interval ``[0, H_n(a)]``.

All bootstrap draws for one test come from a single :class:`RngStream`,
consumed as a ``(B, n)`` block of exponentials.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from .families import HazardModel
from .gcm import PiecewiseLinearFn
from .hazard import (
    DegenerateIntervalError,
    as_sample,
    default_penalty,
    penalized_isotonic_hazard,
    restricted_gcm_cumhaz,
)
from .rng import BOOT_EXPONENTIAL, BOOT_NAIVE, BOOT_SMOOTHED, DEFAULT_SEED, RngStream
from .smoothing import SmoothHazard, default_bandwidth, validate_bandwidth
from .statistics import INTEGRAL, StatisticSpec, statistic, statistic_batch

SMOOTHED = "smoothed_isotonic"
NAIVE = "naive_isotonic"
EXPONENTIAL = "exponential_durot"
METHODS = (SMOOTHED, NAIVE, EXPONENTIAL)
_STREAM_CODE = {SMOOTHED: BOOT_SMOOTHED, NAIVE: BOOT_NAIVE, EXPONENTIAL: BOOT_EXPONENTIAL}


class DegenerateFitError(ValueError):
    """Raised when an isotonic fit cannot serve as a resampling model."""


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = 2000
    alpha: float = 0.1
    bandwidth_constant: float = 1.0
    bandwidth_exponent: float = -0.25
    penalty: float | None = None
    penalty_constant: float = 2.0
    method: str = SMOOTHED
    seed: int = DEFAULT_SEED
    reflect: bool = False

    def __post_init__(self):
        if int(self.B) < 1:
            raise ValueError("B must be at least 1")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.method not in METHODS:
            raise ValueError(f"unknown bootstrap method {self.method!r}")
        if self.penalty is not None and self.penalty < 0:
            raise ValueError("penalty must be nonnegative")

    def bandwidth(self, n):
        return default_bandwidth(n, self.bandwidth_constant, self.bandwidth_exponent)

    def penalty_for(self, n):
        return default_penalty(n, self.penalty_constant) if self.penalty is None else self.penalty


@dataclass
class TestOutcome:
    statistic: float
    bootstrap_values: np.ndarray
    critical_value: float
    p_value: float
    reject: bool
    method: str
    statistic_kind: str
    p: float
    interval: tuple
    n: int
    seed: int
    config: dict
    diagnostics: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    def to_dict(self, include_values=True):
        d = {
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "p_value": self.p_value,
            "reject": self.reject,
            "method": self.method,
            "statistic_kind": self.statistic_kind,
            "p": self.p,
            "interval": list(self.interval),
            "n": self.n,
            "seed": self.seed,
            "config": self.config,
            "diagnostics": self.diagnostics,
        }
        if include_values:
            d["bootstrap_values"] = [float(v) for v in self.bootstrap_values]
        return d


def critical_value(values, alpha) -> float:
    """Empirical ``(1 - alpha)``-quantile (inverse of the empirical cdf)."""
    v = np.sort(np.asarray(values, dtype=float))
    k = math.ceil((1.0 - alpha) * v.size - 1e-9) - 1
    return float(v[min(max(k, 0), v.size - 1)])


def p_value(stat, values) -> float:
    values = np.asarray(values, dtype=float)
    return float((1 + np.count_nonzero(values >= stat)) / (values.size + 1))


def _stream(cfg, method, stream):
    return stream if stream is not None else RngStream(cfg.seed, 0, 0, _STREAM_CODE[method])


def _finish(T, values, cfg, method, spec, interval, n, stream, diagnostics):
    empty = ~np.isfinite(values)
    if empty.any():
        # a bootstrap sample with no point in the interval has an empty integral / sup
        values = np.where(empty, 0.0, values)
        diagnostics["empty_bootstrap_samples"] = int(empty.sum())
    crit = critical_value(values, cfg.alpha)
    return TestOutcome(
        statistic=float(T),
        bootstrap_values=values,
        critical_value=crit,
        p_value=p_value(T, values),
        reject=bool(T > crit),
        method=method,
        statistic_kind=spec.kind,
        p=float(spec.p),
        interval=tuple(float(v) for v in interval),
        n=int(n),
        seed=stream.seed,
        config={k: v for k, v in asdict(cfg).items()},
        diagnostics=diagnostics,
    )


def _resample(model: HazardModel, n, B, stream):
    xs = model.inverse_cumhaz(stream.exponentials((B, n)))
    xs.sort(axis=1)
    return xs


def fit_smoothed_model(sample, a, cfg: BootstrapConfig = BootstrapConfig()) -> SmoothHazard:
    x = as_sample(sample)
    fit = penalized_isotonic_hazard(x, a, cfg.penalty_for(x.size))
    return SmoothHazard(fit, cfg.bandwidth(x.size), reflect=cfg.reflect)


def smoothed_isotonic_bootstrap_test(
    sample, a, cfg: BootstrapConfig = BootstrapConfig(), stat=StatisticSpec(), stream=None
) -> TestOutcome:
    """Bootstrap from the smoothed penalized isotonic hazard fitted on ``[0, a]``."""
    x = as_sample(sample)
    n = x.size
    stream = _stream(cfg, SMOOTHED, stream)
    T = statistic(x, (0.0, a), stat)
    model = fit_smoothed_model(x, a, cfg)
    bw = validate_bandwidth(n, model.bandwidth)
    diagnostics = {"bandwidth": model.bandwidth, "silverman_ratio": bw.ratio,
                   "bandwidth_warning": bw.warning, "penalty": model.base.penalty}
    values = statistic_batch(_resample(model, n, cfg.B, stream), (0.0, a), stat)
    return _finish(T, values, cfg, SMOOTHED, stat, (0.0, a), n, stream, diagnostics)


class IsotonicCumhazModel(HazardModel):
    """Piecewise-linear (unsmoothed) isotonic cumulative hazard as a resampling model.

    Past its right end the cumulative hazard continues linearly with the
    last slope, which is the largest and, for a nondegenerate fit, positive.
    """

    def __init__(self, H: PiecewiseLinearFn):
        slopes = H.slopes
        if not slopes[-1] > 0:
            raise DegenerateFitError("the isotonic cumulative hazard is identically zero")
        if H.knots_x[0] != 0.0 or H.knots_y[0] != 0.0:
            raise ValueError("the cumulative hazard must start at (0, 0)")
        self.H = H
        self.a_eff = float(H.knots_x[-1])
        self.H_end = float(H.knots_y[-1])
        self.tail = float(slopes[-1])

    def hazard(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.H.knots_x, x, side="right") - 1, 0, self.H.slopes.size - 1)
        out = np.where(x < self.a_eff, self.H.slopes[idx], self.tail)
        return float(out) if out.ndim == 0 else out

    def hazard_deriv(self, x):
        out = np.zeros_like(np.asarray(x, dtype=float))
        return float(out) if out.ndim == 0 else out

    def cumhaz(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.interp(np.minimum(x, self.a_eff), self.H.knots_x, self.H.knots_y)
        out = np.where(x <= self.a_eff, inside, self.H_end + self.tail * (x - self.a_eff))
        return float(out) if out.ndim == 0 else out

    def inverse_cumhaz(self, e):
        e = np.asarray(e, dtype=float)
        inside = self.H.inverse(np.minimum(e, self.H_end))
        out = np.where(e <= self.H_end, inside, self.a_eff + (e - self.H_end) / self.tail)
        return float(out) if out.ndim == 0 else out


def naive_isotonic_bootstrap_test(
    sample, a, cfg: BootstrapConfig = BootstrapConfig(method=NAIVE), stat=StatisticSpec(),
    stream=None,
) -> TestOutcome:
    """Bootstrap from the unpenalized, unsmoothed isotonic fit on ``[0, a]``."""
    x = as_sample(sample)
    n = x.size
    stream = _stream(cfg, NAIVE, stream)
    T = statistic(x, (0.0, a), stat)
    H, _, _ = restricted_gcm_cumhaz(x, (0.0, a))
    model = IsotonicCumhazModel(H)
    values = statistic_batch(_resample(model, n, cfg.B, stream), (0.0, a), stat)
    return _finish(T, values, cfg, NAIVE, stat, (0.0, a), n, stream, {"tail_hazard": model.tail})


def transformed_right_end(sample, a) -> float:
    """``H_n(a)``, or the finite left limit ``log n`` when ``a >= X_(n)``."""
    x = as_sample(sample)
    n = x.size
    if a >= x[-1]:
        return math.log(n)
    k = np.searchsorted(x, a, side="right")
    return math.log(n) - math.log(n - k)


def durot_calibrated_test(
    sample, a, cfg: BootstrapConfig = BootstrapConfig(method=EXPONENTIAL),
    stat=StatisticSpec("sup_durot"), stream=None,
) -> TestOutcome:
    """Calibrate with standard exponential samples on ``[0, H_n(a)]``."""
    x = as_sample(sample)
    n = x.size
    stream = _stream(cfg, EXPONENTIAL, stream)
    T = statistic(x, (0.0, a), stat)
    right = transformed_right_end(x, a)
    if not right > 0:
        raise DegenerateIntervalError(f"no observation below a = {a}")
    e = stream.exponentials((cfg.B, n))
    e.sort(axis=1)
    values = statistic_batch(e, (0.0, right), stat)
    return _finish(T, values, cfg, EXPONENTIAL, stat, (0.0, a), n, stream,
                   {"transformed_right_end": right})


def run_test(sample, a, cfg: BootstrapConfig = BootstrapConfig(), stat=StatisticSpec(), stream=None):
    """Dispatch on ``cfg.method``."""
    engine = {
        SMOOTHED: smoothed_isotonic_bootstrap_test,
        NAIVE: naive_isotonic_bootstrap_test,
        EXPONENTIAL: durot_calibrated_test,
    }[cfg.method]
    return engine(sample, a, cfg, stat, stream)


@dataclass(frozen=True)
class PluginFactors:
    mu_factor: float
    sigma_factor: float
    finite: bool
    message: str = ""


def plugin_integrals(model: HazardModel, a, b, points=None, grid=2001) -> PluginFactors:
    """``int_a^b (2 h f / h')^{1/3} f dt`` and the ``4/3``-power analogue for ``model``.

    Returns a non-finite result, flagged, when ``h'`` vanishes somewhere on
    ``(a, b)``.
    """
    t = np.linspace(a, b, grid)[1:-1]
    if np.any(~(np.asarray(model.hazard_deriv(t)) > 0)):
        return PluginFactors(math.nan, math.nan, False, "hazard derivative vanishes on the interval")

    def ratio(s):
        return 2.0 * model.hazard(s) * model.density(s) / model.hazard_deriv(s)

    def mu(s):
        return ratio(s) ** (1.0 / 3.0) * model.density(s)

    def sigma(s):
        return ratio(s) ** (4.0 / 3.0) * model.density(s)

    pts = None
    if points is not None:
        pts = sorted(p for p in np.unique(points) if a < p < b) or None
    opts = dict(limit=400, epsabs=1e-13, epsrel=1e-11, points=pts)
    m, _ = integrate.quad(mu, a, b, **opts)
    s, _ = integrate.quad(sigma, a, b, **opts)
    return PluginFactors(m, s, bool(np.isfinite(m) and np.isfinite(s)))


def plugin_asymptotic_factors(s: SmoothHazard, interval) -> PluginFactors:
    """Plug-in distribution factors of the asymptotic mean and variance, from a smoothed fit."""
    a, b = interval
    t, _ = s.atoms
    kinks = np.concatenate((t - s.bandwidth, t, t + s.bandwidth, [s.a_eff]))
    return plugin_integrals(s, a, b, points=kinks)
