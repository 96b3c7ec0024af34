"""Test statistics for local monotonicity of a hazard.

``t_n`` is the integral distance between the empirical cdf (left limits)
and the cdf of the restricted GCM, integrated against the empirical
measure; ``durot_stat`` is the supremum distance between the empirical
cumulative hazard and its GCM.

The ``*_batch`` variants evaluate many sorted samples at once in a
compiled loop; they are what the bootstrap engines call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .gcm import lower_hull_indices
from .hazard import as_interval, as_sample, ecdf, empirical_cumhaz, fhat_from_cumhaz
from .hazard import restricted_gcm_cumhaz

INTEGRAL = "integral_Tn"
SUP = "sup_durot"


@dataclass(frozen=True)
class StatisticSpec:
    kind: str = INTEGRAL
    p: float = 1.0

    def __post_init__(self):
        if self.kind not in (INTEGRAL, SUP):
            raise ValueError(f"unknown statistic kind {self.kind!r}")
        if not self.p >= 1:
            raise ValueError("power p must be >= 1")


def _integral_terms(x, interval):
    H, a, b_eff = restricted_gcm_cumhaz(x, interval)
    pts = x[(x > a) & (x <= b_eff)]
    gap = ecdf(x).left_limit(pts) - fhat_from_cumhaz(H, pts)
    return np.maximum(np.atleast_1d(gap), 0.0)


def t_n(sample, interval, p=1.0) -> float:
    """Integral statistic over the observations in ``(a, b_eff]``, ``b_eff = min(b, X_(n))``.

    ``p = inf`` returns the largest integrand value.
    """
    if not p >= 1:
        raise ValueError("power p must be >= 1")
    x = as_sample(sample)
    terms = _integral_terms(x, as_interval(interval))
    if math.isinf(p):
        return float(terms.max(initial=0.0))
    return float(np.sum(terms**p) / x.size)


def durot_stat(sample, interval) -> float:
    """``sup {H_n(x) - Hhat_n(x)}`` over ``[a, b_eff]``.

    Between jumps ``H_n`` is flat while ``Hhat_n`` increases, so the
    supremum is attained at a jump point. The largest observation is
    excluded because ``H_n`` is infinite there.
    """
    x = as_sample(sample)
    H, a, b_eff = restricted_gcm_cumhaz(x, interval)
    cand = np.unique(x[(x >= a) & (x <= b_eff) & (x < x[-1])])
    if cand.size == 0:
        return 0.0
    gap = empirical_cumhaz(x)(cand) - H(cand)
    return float(max(0.0, np.max(gap)))


def statistic(sample, interval, spec: StatisticSpec = StatisticSpec()) -> float:
    if spec.kind == SUP:
        return durot_stat(sample, interval)
    return t_n(sample, interval, spec.p)


@njit(cache=True, nogil=True)
def _stat_row(x, lo, hi, kind_sup, p, xs, ys, cnt, mult, hull):
    n = x.shape[0]
    logn = math.log(n)
    b_eff = min(hi, x[n - 1])
    below = 0
    while below < n and x[below] < lo:
        below += 1
    at_lo = 0
    while below + at_lo < n and x[below + at_lo] == lo:
        at_lo += 1
    i = below + at_lo
    if not b_eff > lo:
        return np.nan
    if at_lo == 0 and (i >= n or x[i] > b_eff):
        return np.nan
    xs[0] = lo
    ys[0] = logn - math.log(n - below)
    m = 1
    while i < n and x[i] <= b_eff:
        k = 1
        while i + k < n and x[i + k] == x[i]:
            k += 1
        xs[m] = x[i]
        ys[m] = logn - math.log(n - i)
        cnt[m] = i
        mult[m] = k
        m += 1
        i += k
    m_obs = m
    if xs[m - 1] < b_eff:
        xs[m] = b_eff
        ys[m] = logn - math.log(n - i)
        m += 1
    nh = lower_hull_indices(xs[:m], ys[:m], hull)

    best = 0.0
    total = 0.0
    if kind_sup and at_lo > 0 and below + at_lo < n:
        best = logn - math.log(n - below - at_lo) - ys[0]
    seg = 0
    for j in range(1, m_obs):
        while seg < nh - 2 and hull[seg + 1] < j:
            seg += 1
        i0 = hull[seg]
        i1 = hull[seg + 1]
        on_vertex = j == i1 or j == i0
        if on_vertex:
            hh = ys[j]
        else:
            hh = ys[i0] + (ys[i1] - ys[i0]) * (xs[j] - xs[i0]) / (xs[i1] - xs[i0])
        if kind_sup:
            after = cnt[j] + mult[j]
            if after < n:
                v = logn - math.log(n - after) - hh
                if v > best:
                    best = v
        else:
            if on_vertex:
                term = 0.0
            else:
                term = math.exp(-hh) - (n - cnt[j]) / n
                if term < 0.0:
                    term = 0.0
            if math.isinf(p):
                if term > best:
                    best = term
            else:
                total += mult[j] * term**p
    if kind_sup or math.isinf(p):
        return best
    return total / n


@njit(cache=True, nogil=True)
def _stat_rows(samples, lo, hi, kind_sup, p, out):
    n = samples.shape[1]
    xs = np.empty(n + 2)
    ys = np.empty(n + 2)
    cnt = np.zeros(n + 2, dtype=np.int64)
    mult = np.zeros(n + 2, dtype=np.int64)
    hull = np.empty(n + 2, dtype=np.int64)
    for r in range(samples.shape[0]):
        out[r] = _stat_row(samples[r], lo, hi, kind_sup, p, xs, ys, cnt, mult, hull)


def statistic_batch(samples, interval, spec: StatisticSpec = StatisticSpec()) -> np.ndarray:
    """Statistic of every row of ``samples`` (each row sorted ascending).

    Rows whose interval holds no observation give ``nan``.
    """
    iv = as_interval(interval)
    arr = np.ascontiguousarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise ValueError("samples must be a (B, n) array with n >= 2")
    out = np.empty(arr.shape[0])
    _stat_rows(arr, iv.a, iv.b, spec.kind == SUP, float(spec.p), out)
    return out


def t_n_batch(samples, interval, p=1.0):
    return statistic_batch(samples, interval, StatisticSpec(INTEGRAL, p))


def durot_batch(samples, interval):
    return statistic_batch(samples, interval, StatisticSpec(SUP))
