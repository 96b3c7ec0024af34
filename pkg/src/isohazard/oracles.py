"""Slow, independent reference implementations for cross-checking.

Nothing in the production modules imports this file; it is loaded by the
test suite and by the hidden ``--self-check`` CLI flag. The algorithms are
deliberately different from the fast paths (chord enumeration instead of
a hull scan, pooling instead of hull slopes, recursive Simpson instead of
closed forms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_POINTS = 300


class OracleSizeError(ValueError):
    pass


def _check_size(n):
    if n > MAX_POINTS:
        raise OracleSizeError(f"oracle limited to {MAX_POINTS} points, got {n}")


def gcm_bruteforce(x, y):
    """Greatest convex minorant values at every ``x_i`` by exhaustive chord search.

    The GCM at ``x_i`` is the minimum over all pairs ``j <= i <= k`` of the
    chord from point ``j`` to point ``k`` evaluated at ``x_i``. O(n^3).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    _check_size(n)
    out = y.copy()
    for i in range(n):
        # every chord (j, k) with j <= i <= k, evaluated at x_i
        j = np.arange(i + 1)[:, None]
        k = np.arange(i, n)[None, :]
        dx = x[k] - x[j]
        with np.errstate(invalid="ignore", divide="ignore"):
            chord = y[j] + (x[i] - x[j]) / dx * (y[k] - y[j])
        chord = np.where(dx > 0, chord, np.inf)
        out[i] = min(out[i], float(chord.min()))
    return out


def gcm_bruteforce_fn(x, y):
    """:class:`PiecewiseLinearFn` through the brute-force minorant values."""
    from .gcm import PiecewiseLinearFn

    return PiecewiseLinearFn(np.asarray(x, dtype=float), gcm_bruteforce(x, y))


def pava(values, weights=None):
    """Weighted least-squares nondecreasing fit by pooling adjacent violators."""
    v = [float(t) for t in values]
    w = [1.0] * len(v) if weights is None else [float(t) for t in weights]
    blocks = []  # [mean, weight, count]
    for vi, wi in zip(v, w):
        blocks.append([vi, wi, 1])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0]:
            m2, w2, c2 = blocks.pop()
            m1, w1, c1 = blocks.pop()
            blocks.append([(m1 * w1 + m2 * w2) / (w1 + w2), w1 + w2, c1 + c2])
    out = []
    for m, _, c in blocks:
        out.extend([m] * c)
    return np.asarray(out)


def isotonic_chord_slopes(x, y):
    """PAVA of the chord slopes of a diagram, weighted by the x-gaps."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = np.diff(x)
    return pava(np.diff(y) / dx, dx)


def tn_bruteforce(sample, interval, p=1.0):
    """Integral statistic from first principles, using :func:`gcm_bruteforce`.

    Works with raw counts; the interval is ``(a, b]`` with ``b`` truncated at
    the largest observation.
    """
    x = sorted(float(t) for t in sample)
    n = len(x)
    _check_size(n + 2)
    a, b = float(interval[0]), float(interval[1])
    b = min(b, x[-1])

    def cumhaz_left(t):
        below = sum(1 for v in x if v < t)
        return -math.log(1.0 - below / n)

    pts = sorted({a, b} | {v for v in x if a < v <= b})
    vals = gcm_bruteforce(pts, [cumhaz_left(t) for t in pts])
    hull_at = dict(zip(pts, vals))
    terms = []
    for v in x:
        if a < v <= b:
            below = sum(1 for u in x if u < v)
            terms.append(below / n - (1.0 - math.exp(-hull_at[v])))
    if math.isinf(p):
        return max([0.0] + terms)
    return sum(max(t, 0.0) ** p for t in terms) / n


def durot_grid(sample, interval, points=10_000):
    """Dense-grid approximation of ``sup {H_n - Hhat_n}`` on ``[a, b_eff)``."""
    from .hazard import empirical_cumhaz, restricted_gcm_cumhaz

    H, a, b_eff = restricted_gcm_cumhaz(sample, interval)
    grid = np.linspace(a, b_eff, points, endpoint=False)
    return float(max(0.0, np.max(empirical_cumhaz(sample)(grid) - H(grid))))


@dataclass
class QuadResult:
    value: float
    converged: bool


def quadrature(f, lo, hi, tol=1e-12, max_depth=60):
    """Adaptive Simpson rule with Richardson correction."""
    lo, hi = float(lo), float(hi)
    ok = [True]

    def simpson(fa, fm, fb, h):
        return h / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, eps, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        diff = left + right - whole
        if abs(diff) <= 15.0 * eps or depth >= max_depth:
            if depth >= max_depth and abs(diff) > 15.0 * eps:
                ok[0] = False
            return left + right + diff / 15.0
        return (rec(a, m, fa, flm, fm, left, eps / 2, depth + 1)
                + rec(m, b, fm, frm, fb, right, eps / 2, depth + 1))

    if hi == lo:
        return QuadResult(0.0, True)
    # split in a fixed number of panels first so narrow features are not missed
    edges = np.linspace(lo, hi, 9)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
        total += rec(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol / 8, 0)
    return QuadResult(total, ok[0])


# ---------------------------------------------------------------- fixtures

@dataclass
class Fixture:
    name: str
    compute: object
    expected: float
    provenance: str
    tol: float


@dataclass
class FixtureResult:
    name: str
    got: float
    expected: float
    tol: float
    ok: bool


def _fixtures():
    from . import families, smoothing, statistics

    k = smoothing.kernel
    return [
        Fixture("kernel integrates to one", lambda: quadrature(k, -1, 1).value, 1.0, "identity", 1e-12),
        Fixture("kernel second moment", lambda: quadrature(lambda u: u * u * k(u), -1, 1).value,
                1.0 / 9.0, "identity", 1e-10),
        Fixture("integral of x on [0, 1]", lambda: quadrature(lambda u: u, 0, 1).value, 0.5,
                "closed-form", 1e-14),
        Fixture("kernel cdf at 0.5", lambda: float(smoothing.kernel_cdf(0.5)),
                0.5 + quadrature(k, 0, 0.5).value, "quadrature", 1e-10),
        Fixture("t_n of {1, 2} on [0, 2.5]", lambda: statistics.t_n([1, 2], (0, 2.5)), 0.0,
                "hand-computed", 1e-12),
        Fixture("t_n of {1, 1.2, 3} on [0, 2.9]", lambda: statistics.t_n([1, 1.2, 3], (0, 2.9)),
                tn_bruteforce([1, 1.2, 3], (0, 2.9)), "hand-computed", 1e-10),
        Fixture("t_n hand value", lambda: statistics.t_n([1, 1.2, 3], (0, 2.9)),
                (1 / 3) * (1 / 3 - (1 - math.exp(-0.2 * math.log(3) / 1.9))), "hand-computed", 1e-12),
        Fixture("durot of {1, 2} on [0, 2.5]", lambda: statistics.durot_stat([1, 2], (0, 2.5)),
                math.log(2), "hand-computed", 1e-12),
        Fixture("d = -1 quantile 0.95", lambda: float(families.DFamily(-1).quantile(0.95)), 2.31165,
                "literature", 5e-6),
        Fixture("d = 1 quantile 0.95", lambda: float(families.DFamily(1).quantile(0.95)), 1.39778,
                "literature", 5e-6),
        Fixture("d = -1 stationary left end",
                lambda: families.d_family_stationary_interval(-1)[0], 5 / 12, "closed-form", 1e-12),
        Fixture("d = -1 stationary right end",
                lambda: families.d_family_stationary_interval(-1)[1], 1.35, "closed-form", 1e-12),
        Fixture("bump gamma = 1 cumhaz at 2",
                lambda: float(families.BumpFamily(0.0, 1.0).cumhaz(2.0)), 2.0, "closed-form", 1e-9),
    ]


def run_fixtures():
    out = []
    for fx in _fixtures():
        try:
            got = float(fx.compute())
            ok = abs(got - fx.expected) <= fx.tol
        except Exception:  # a crashing fixture is a failed fixture
            got, ok = math.nan, False
        out.append(FixtureResult(fx.name, got, float(fx.expected), fx.tol, ok))
    return out
