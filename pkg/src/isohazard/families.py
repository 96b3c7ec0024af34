"""Lifetime distributions described through their hazard.

:class:`HazardModel` is the common contract (hazard, cumulative hazard,
cdf, quantiles, sampling by inversion of exponentials). Concrete models:
the exponential and Weibull laws, the cubic ``d``-family, the
power-times-bump family, and the chord linearization of any model on an
interval.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .rng import exponentials


def _out(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


def invert_increasing(cumhaz, hazard, e, xtol=1e-12, max_iter=200):
    """Solve ``cumhaz(x) = e`` for ``x >= 0`` (vectorized safeguarded Newton).

    ``cumhaz`` must be continuous, nondecreasing, zero at 0 and unbounded.
    """
    e = np.asarray(e, dtype=float)
    ef = e.ravel().copy()
    if np.any(ef < 0) or not np.all(np.isfinite(ef)):
        raise ValueError("cumulative hazard values must be finite and >= 0")
    lo = np.zeros_like(ef)
    hi = np.ones_like(ef)
    for _ in range(1100):
        short = cumhaz(hi) < ef
        if not short.any():
            break
        lo = np.where(short, hi, lo)
        hi = np.where(short, 2.0 * hi, hi)
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        r = cumhaz(x) - ef
        lo = np.where(r < 0, x, lo)
        hi = np.where(r >= 0, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - r / hazard(x)
        bad = ~np.isfinite(xn) | (xn < lo) | (xn > hi)
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        done = (np.abs(xn - x) <= xtol) | (hi - lo <= xtol)
        x = xn
        if done.all():
            break
    x = np.where(ef == 0, 0.0, x)
    return _out(x.reshape(e.shape))


class HazardModel:
    """Distribution on ``[0, inf)`` given by its hazard.

    Subclasses implement :meth:`hazard`, :meth:`hazard_deriv` and
    :meth:`cumhaz`; they may override :meth:`inverse_cumhaz` with a faster
    exact inverse.
    """

    def hazard(self, x):
        raise NotImplementedError

    def hazard_deriv(self, x):
        raise NotImplementedError

    def cumhaz(self, x):
        raise NotImplementedError

    def inverse_cumhaz(self, e):
        return invert_increasing(self.cumhaz, self.hazard, e)

    def cdf(self, x):
        return _out(-np.expm1(-np.asarray(self.cumhaz(x), dtype=float)))

    def survival(self, x):
        return _out(np.exp(-np.asarray(self.cumhaz(x), dtype=float)))

    def density(self, x):
        return _out(np.asarray(self.hazard(x)) * self.survival(x))

    def quantile(self, q):
        q = np.asarray(q, dtype=float)
        if np.any((q < 0) | (q >= 1)):
            raise ValueError("quantile level must lie in [0, 1)")
        return self.inverse_cumhaz(-np.log1p(-q))

    def sample(self, n, rng):
        return sample(self, n, rng)


def sample(model: HazardModel, n, rng) -> np.ndarray:
    """Sorted sample ``X_i = H^{-1}(E_i)`` from standard exponentials ``E_i``."""
    if n < 2:
        raise ValueError("sample size must be at least 2")
    return np.sort(np.asarray(model.inverse_cumhaz(exponentials(rng, n)), dtype=float))


def _nonneg(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("hazard models live on [0, inf); got a negative argument")
    return x


class ExponentialModel(HazardModel):
    def __init__(self, rate=1.0):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = float(rate)

    def __repr__(self):
        return f"ExponentialModel(rate={self.rate})"

    def hazard(self, x):
        return _out(np.full_like(_nonneg(x), self.rate))

    def hazard_deriv(self, x):
        return _out(np.zeros_like(_nonneg(x)))

    def cumhaz(self, x):
        return _out(self.rate * _nonneg(x))

    def inverse_cumhaz(self, e):
        return _out(np.asarray(e, dtype=float) / self.rate)


class WeibullModel(HazardModel):
    """Weibull law with ``H(x) = (x / scale) ** shape``."""

    def __init__(self, shape, scale=1.0):
        if shape <= 0 or scale <= 0:
            raise ValueError("shape and scale must be positive")
        self.shape = float(shape)
        self.scale = float(scale)

    def __repr__(self):
        return f"WeibullModel(shape={self.shape}, scale={self.scale})"

    def hazard(self, x):
        x = _nonneg(x)
        k, s = self.shape, self.scale
        with np.errstate(divide="ignore"):
            return _out(k / s * (x / s) ** (k - 1))

    def hazard_deriv(self, x):
        x = _nonneg(x)
        k, s = self.shape, self.scale
        with np.errstate(divide="ignore", invalid="ignore"):
            return _out(k * (k - 1) / s**2 * (x / s) ** (k - 2))

    def cumhaz(self, x):
        return _out((_nonneg(x) / self.scale) ** self.shape)

    def inverse_cumhaz(self, e):
        return _out(self.scale * np.asarray(e, dtype=float) ** (1.0 / self.shape))


class DFamily(HazardModel):
    """Cubic hazard ``1/2 + 5/2 {(x - 3/4)^3 + (3/4)^3} + d x^2``.

    Nonmonotone on an interval around ``x = 3/4`` for ``d < 0``, strictly
    increasing for ``d > 0``.
    """

    _C = 0.75

    def __init__(self, d):
        d = float(d)
        if abs(d) > 1:
            warnings.warn(f"d = {d} lies outside the studied range [-1, 1]", stacklevel=2)
        self.d = d

    def __repr__(self):
        return f"DFamily(d={self.d})"

    def hazard(self, x):
        x = _nonneg(x)
        c = self._C
        return _out(0.5 + 2.5 * ((x - c) ** 3 + c**3) + self.d * x**2)

    def hazard_deriv(self, x):
        x = _nonneg(x)
        return _out(7.5 * (x - self._C) ** 2 + 2.0 * self.d * x)

    def cumhaz(self, x):
        x = _nonneg(x)
        c = self._C
        return _out(
            0.5 * x + 2.5 * (0.25 * (x - c) ** 4 + c**3 * x) + self.d * x**3 / 3.0 - 0.625 * c**4
        )

    def stationary_interval(self):
        return d_family_stationary_interval(self.d)


def d_family_cdf(d, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("the d-family cdf is defined for x >= 0")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return DFamily(d).cdf(x)


def d_family_hazard(d, x):
    """``(h_d(x), h_d'(x))``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        m = DFamily(d)
    return m.hazard(x), m.hazard_deriv(x)


def d_family_stationary_interval(d):
    """Interval where ``h_d`` decreases (``d < 0``), the stationary point 3/4 (``d = 0``), else ``None``.

    For ``d = 0`` the degenerate interval ``(0.75, 0.75)`` is returned.
    """
    d = float(d)
    if d > 0:
        return None
    centre = 0.75 - 2.0 * d / 15.0
    half = 2.0 / 15.0 * math.sqrt(d * d - 45.0 * d / 4.0)
    return centre - half, centre + half


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)
_GL7_NODES, _GL7_WEIGHTS = np.polynomial.legendre.leggauss(7)


def _gl(f, lo, hi, nodes=_GL_NODES, weights=_GL_WEIGHTS):
    """Fixed-order Gauss-Legendre on each ``[lo_j, hi_j]`` (vectorized)."""
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    half = 0.5 * (hi - lo)
    pts = lo + half * (nodes + 1.0)
    return np.sum(weights * f(pts), axis=-1) * half[..., 0]


class BumpFamily(HazardModel):
    """Hazard ``x^gamma * exp(beta * phi_sigma(x - mu))`` with a Gaussian bump ``phi_sigma``.

    The cumulative hazard is integrated with the substitution
    ``u = s^(1/(1+gamma))``, which removes the ``x^gamma`` singularity at 0,
    on adaptively refined Gauss-Legendre panels built once per model.
    """

    def __init__(self, beta, gamma, mu=1.0, sigma=0.1, tol=1e-13):
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        if gamma <= -1:
            raise ValueError("gamma <= -1 gives a non-integrable hazard at 0")
        if not (-0.5 <= gamma <= 1) or not (0 <= beta <= 0.3):
            warnings.warn("bump-family parameters outside the studied ranges", stacklevel=2)
        self.beta = float(beta)
        self.gamma = float(gamma)
        self.mu = float(mu)
        self.sigma = float(sigma)
        self._k = 1.0 / (1.0 + self.gamma)
        if self.beta != 0.0:
            self._build_cache(tol)

    def __repr__(self):
        return (
            f"BumpFamily(beta={self.beta}, gamma={self.gamma}, mu={self.mu}, sigma={self.sigma})"
        )

    def _bump(self, u):
        z = (u - self.mu) / self.sigma
        return self.beta / (self.sigma * math.sqrt(2 * math.pi)) * np.exp(-0.5 * z * z)

    def _g(self, u):
        return np.exp(self._bump(u))

    def _integrand_s(self, s):
        return self._k * self._g(s**self._k)

    def _build_cache(self, tol):
        s_end = max((self.mu + 40.0 * self.sigma) ** (1.0 + self.gamma), 1.0)
        stack = [(0.0, s_end)]
        edges = []
        while stack:
            lo, hi = stack.pop()
            whole = _gl(self._integrand_s, lo, hi)
            mid = 0.5 * (lo + hi)
            halves = _gl(self._integrand_s, [lo, mid], [mid, hi]).sum()
            if abs(whole - halves) <= tol * max(hi - lo, 1e-3) or hi - lo < 1e-9:
                edges.append((lo, hi))
            else:
                stack.extend([(mid, hi), (lo, mid)])
        edges.sort()
        self._edges = np.array([e[0] for e in edges] + [edges[-1][1]])
        panel = _gl(self._integrand_s, self._edges[:-1], self._edges[1:])
        self._cum = np.concatenate(([0.0], np.cumsum(panel)))
        self._s_end = s_end
        self._tail_rate = float(self._integrand_s(np.array(s_end)))

    def hazard(self, x):
        x = _nonneg(x)
        with np.errstate(divide="ignore"):
            return _out(x**self.gamma * self._g(x))

    def hazard_deriv(self, x):
        x = _nonneg(x)
        g = self._g(x)
        dlog_g = self._bump(x) * (-(x - self.mu) / self.sigma**2)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = g * (self.gamma * x ** (self.gamma - 1.0) + x**self.gamma * dlog_g)
        if self.gamma == 0.0:
            out = g * dlog_g
        return _out(out)

    def cumhaz(self, x):
        x = _nonneg(x)
        s = x ** (1.0 + self.gamma)
        if self.beta == 0.0:
            return _out(self._k * s)
        sf = s.ravel()
        inside = sf < self._s_end
        out = np.empty_like(sf)
        si = sf[inside]
        p = np.searchsorted(self._edges, si, side="right") - 1
        out[inside] = self._cum[p] + _gl(self._integrand_s, self._edges[p], si)
        out[~inside] = self._cum[-1] + self._tail_rate * (sf[~inside] - self._s_end)
        return _out(out.reshape(s.shape))

    def inverse_cumhaz(self, e):
        if self.beta == 0.0:
            e = np.asarray(e, dtype=float)
            return _out((e / self._k) ** (1.0 / (1.0 + self.gamma)))
        return super().inverse_cumhaz(e)


class LinearizedModel(HazardModel):
    """``base`` with its cumulative hazard replaced by the chord on ``[a, b)``.

    Constant hazard ``(H(b) - H(a)) / (b - a)`` on ``(a, b)``; unchanged
    elsewhere. This is the least favourable member of the monotone-hazard
    null on ``[a, b]`` for the integral statistic.
    """

    def __init__(self, base: HazardModel, a, b):
        a, b = float(a), float(b)
        if not (0 <= a < b):
            raise ValueError("need 0 <= a < b")
        self.base = base
        self.a, self.b = a, b
        self.Ha = float(base.cumhaz(a))
        self.Hb = float(base.cumhaz(b))
        if not self.Hb > self.Ha:
            raise ValueError("cumulative hazard must increase over [a, b]")
        self.slope = (self.Hb - self.Ha) / (b - a)

    def __repr__(self):
        return f"LinearizedModel({self.base!r}, a={self.a}, b={self.b})"

    def _inside(self, x):
        return (x >= self.a) & (x < self.b)

    def hazard(self, x):
        x = _nonneg(x)
        return _out(np.where(self._inside(x), self.slope, self.base.hazard(x)))

    def hazard_deriv(self, x):
        x = _nonneg(x)
        return _out(np.where(self._inside(x), 0.0, self.base.hazard_deriv(x)))

    def cumhaz(self, x):
        x = _nonneg(x)
        chord = (self.Hb * (x - self.a) + self.Ha * (self.b - x)) / (self.b - self.a)
        return _out(np.where(self._inside(x), chord, self.base.cumhaz(x)))

    def inverse_cumhaz(self, e):
        e = np.asarray(e, dtype=float)
        inside = (e >= self.Ha) & (e < self.Hb)
        out = np.asarray(self.base.inverse_cumhaz(e), dtype=float)
        out = np.where(inside, self.a + (e - self.Ha) / self.slope, out)
        return _out(out)

    def coupling_map(self, x):
        """``phi(x) = H_ab^{-1}(H(x))``; convex increasing on ``[a, b]`` with ``phi(x) <= x``."""
        return self.inverse_cumhaz(self.base.cumhaz(x))


def linearize_cumhaz(model: HazardModel, a, b) -> LinearizedModel:
    return LinearizedModel(model, a, b)
