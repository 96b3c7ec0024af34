"""Empirical distribution, empirical cumulative hazard and isotonic fits.

Cusum ordinates always use the left limit ``H_n(x-)`` of the empirical
cumulative hazard. That keeps every diagram finite (``H_n`` jumps to
infinity at the largest observation) and makes ``Hhat_n <= H_n(.-)`` hold
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gcm import CusumDiagram, PiecewiseLinearFn, gcm


class SampleError(ValueError):
    """Raised for data that cannot serve as a lifetime sample."""


class DegenerateIntervalError(ValueError):
    """Raised when an interval contains too few observations for a fit."""


def as_sample(values) -> np.ndarray:
    """Validate ``values`` and return them as sorted order statistics."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size < 2:
        raise SampleError("need at least 2 observations")
    if not np.all(np.isfinite(x)):
        raise SampleError("observations must be finite")
    if np.any(x <= 0):
        raise SampleError("observations must be strictly positive")
    return np.sort(x)


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (0 <= a < b):
            raise ValueError(f"need 0 <= a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


def as_interval(interval) -> Interval:
    if isinstance(interval, Interval):
        return interval
    a, b = interval
    return Interval(a, b)


class StepFn:
    """Right-continuous nondecreasing step function.

    ``values[k]`` is the value on ``[jumps[k], jumps[k+1])``; ``initial`` is
    the value left of the first jump. Values may be ``inf``.
    """

    def __init__(self, jumps, values, initial=0.0):
        self.jumps = np.asarray(jumps, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.jumps.shape != self.values.shape:
            raise ValueError("jumps and values must have equal length")
        self.initial = float(initial)
        self._table = np.concatenate(([self.initial], self.values))

    def __call__(self, x):
        out = self._table[np.searchsorted(self.jumps, x, side="right")]
        return float(out) if np.ndim(out) == 0 else out

    def left_limit(self, x):
        out = self._table[np.searchsorted(self.jumps, x, side="left")]
        return float(out) if np.ndim(out) == 0 else out

    value_at = __call__
    value_at_left = left_limit


def ecdf(sample) -> StepFn:
    """Empirical distribution function with jumps ``1/n`` per observation."""
    x = as_sample(sample)
    locs, counts = np.unique(x, return_counts=True)
    return StepFn(locs, np.cumsum(counts) / x.size)


def empirical_cumhaz(sample) -> StepFn:
    """``H_n = -log(1 - F_n)``; equals ``inf`` at and beyond the largest observation."""
    x = as_sample(sample)
    locs, counts = np.unique(x, return_counts=True)
    at_risk_after = x.size - np.cumsum(counts)
    with np.errstate(divide="ignore"):
        vals = np.log(x.size) - np.log(at_risk_after.astype(float))
    return StepFn(locs, vals)


def _cumhaz_left(x_sorted, t):
    """``H_n(t-)`` evaluated at the points ``t`` (finite for ``t <= X_(n)``)."""
    n = x_sorted.size
    below = np.searchsorted(x_sorted, t, side="left")
    return np.log(n) - np.log((n - below).astype(float))


def restricted_gcm_cumhaz(sample, interval):
    """GCM of ``H_n(.-)`` restricted to ``[a, b_eff]`` with ``b_eff = min(b, X_(n))``.

    Returns ``(Hhat, a, b_eff)`` where ``Hhat`` is a :class:`PiecewiseLinearFn`
    on ``[a, b_eff]``.
    """
    x = as_sample(sample)
    iv = as_interval(interval)
    a = iv.a
    b_eff = min(iv.b, x[-1])
    if not b_eff > a or not np.any((x >= a) & (x <= b_eff)):
        raise DegenerateIntervalError(f"no observation in the interval ({a}, {iv.b}]")
    inside = x[(x > a) & (x <= b_eff)]
    pts = np.unique(np.concatenate(([a], inside, [b_eff])))
    diagram = CusumDiagram(pts, _cumhaz_left(x, pts))
    return gcm(diagram), a, b_eff


def fhat_from_cumhaz(H: PiecewiseLinearFn, x):
    """Distribution function ``1 - exp(-H(x))`` induced by a cumulative hazard."""
    out = -np.expm1(-np.asarray(H(x), dtype=float))
    return float(out) if out.ndim == 0 else out


def default_penalty(n, constant=2.0):
    return constant * n ** (-2.0 / 3.0)


@dataclass(frozen=True)
class IsotonicHazardFit:
    """Nondecreasing step hazard on ``[0, a_eff]``.

    ``levels[k]`` is the hazard on ``(breakpoints[k], breakpoints[k+1]]``
    (left derivative of the GCM), so ``levels[0]`` is the right limit at 0.
    """

    breakpoints: np.ndarray
    levels: np.ndarray
    a_eff: float
    penalty: float
    n: int

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, x, side="left") - 1
        idx = np.clip(idx, 0, self.levels.size - 1)
        out = self.levels[idx]
        return float(out) if out.ndim == 0 else out

    def atoms(self):
        """Locations and masses of the measure ``d hhat`` (atom at 0 of mass ``hhat(0+)``)."""
        t = self.breakpoints[:-1].copy()
        mass = np.diff(self.levels, prepend=0.0)
        return t, mass

    def cumhaz(self):
        """The underlying GCM as a piecewise-linear cumulative hazard."""
        y = np.concatenate(([0.0], np.cumsum(self.levels * np.diff(self.breakpoints))))
        return PiecewiseLinearFn(self.breakpoints, y)


def penalized_isotonic_hazard(sample, a, penalty=None) -> IsotonicHazardFit:
    """Isotonic least-squares hazard on ``[0, a]`` from the penalized cusum diagram.

    Diagram points are ``(0, 0)``, ``(X_(i), H_n(X_(i)-) + penalty)`` for
    ``X_(i) < a_eff`` and ``(a_eff, H_n(a_eff-))`` with
    ``a_eff = min(a, X_(n))``. The default penalty is ``2 n^(-2/3)``.
    """
    x = as_sample(sample)
    n = x.size
    if penalty is None:
        penalty = default_penalty(n)
    penalty = float(penalty)
    if penalty < 0:
        raise ValueError("penalty must be nonnegative")
    a_eff = min(float(a), x[-1])
    inner = np.unique(x[x < a_eff])
    if inner.size == 0:
        raise DegenerateIntervalError(f"no observation below a = {a}")
    px = np.concatenate(([0.0], inner, [a_eff]))
    py = np.concatenate(([0.0], _cumhaz_left(x, inner) + penalty, _cumhaz_left(x, [a_eff])))
    f = gcm(CusumDiagram(px, py))
    return IsotonicHazardFit(f.knots_x, f.slopes, a_eff, penalty, n)
