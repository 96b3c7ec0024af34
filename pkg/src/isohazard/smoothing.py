"""Triweight-kernel smoothing of the penalized isotonic hazard.

The isotonic step hazard is represented by the atoms ``(t_j, D_j)`` of its
Lebesgue-Stieltjes measure (one atom at 0 carrying ``hhat(0+)``). Then

    h~(x)  = sum_j D_j IK((x - t_j) / b)
    h~'(x) = sum_j D_j K((x - t_j) / b) / b
    H~(x)  = sum_j D_j b [J((x - t_j) / b) - J(-t_j / b)]

with ``IK`` the kernel cdf and ``J`` its integral, both closed-form
polynomials. Past the fit's right end ``a_eff`` the hazard is continued
at the constant level ``h~(a_eff)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .families import HazardModel
from .hazard import IsotonicHazardFit

_KC = 35.0 / 32.0
# P(1) for P(u) = u^2/2 - u^4/4 + u^6/10 - u^8/56
_P1 = 93.0 / 280.0
INVERSE_XTOL = 1e-12


@njit(cache=True, nogil=True)
def _kernel(u):
    if u <= -1.0 or u >= 1.0:
        return 0.0
    w = 1.0 - u * u
    return _KC * w * w * w


@njit(cache=True, nogil=True)
def _kernel_cdf(u):
    if u <= -1.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    u2 = u * u
    return 0.5 + _KC * u * (1.0 - u2 * (1.0 - u2 * (0.6 - u2 / 7.0)))


@njit(cache=True, nogil=True)
def _kernel_cdf_integral(u):
    if u <= -1.0:
        return 0.0
    if u >= 1.0:
        return u
    u2 = u * u
    p = u2 * (0.5 - u2 * (0.25 - u2 * (0.1 - u2 / 56.0)))
    return 0.5 * (u + 1.0) + _KC * (p - _P1)


def _vectorize(f):
    def wrapped(u):
        u = np.asarray(u, dtype=float)
        out = np.array([f(v) for v in u.ravel()]).reshape(u.shape)
        return float(out) if out.ndim == 0 else out

    wrapped.__doc__ = f.__doc__
    return wrapped


kernel = _vectorize(_kernel)
kernel.__doc__ = "Triweight density ``35/32 (1 - u^2)^3`` on ``[-1, 1]``."
kernel_cdf = _vectorize(_kernel_cdf)
kernel_cdf.__doc__ = "``IK(u)``: integral of the triweight kernel up to ``u``."
kernel_cdf_integral = _vectorize(_kernel_cdf_integral)
kernel_cdf_integral.__doc__ = (
    "``J(u)``: integral of ``IK`` from -1 to ``u``; ``J(u) = u`` for ``u >= 1``."
)


@njit(cache=True, nogil=True)
def _h(x, t, d, b, reflect):
    s = 0.0
    for j in range(t.shape[0]):
        s += d[j] * _kernel_cdf((x - t[j]) / b)
        if reflect:
            s += d[j] * (1.0 - _kernel_cdf((x + t[j]) / b))
    return s


@njit(cache=True, nogil=True)
def _dh(x, t, d, b, reflect):
    s = 0.0
    for j in range(t.shape[0]):
        s += d[j] * _kernel((x - t[j]) / b)
        if reflect:
            s -= d[j] * _kernel((x + t[j]) / b)
    return s / b


@njit(cache=True, nogil=True)
def _H(x, t, d, b, reflect):
    s = 0.0
    for j in range(t.shape[0]):
        s += d[j] * b * (_kernel_cdf_integral((x - t[j]) / b) - _kernel_cdf_integral(-t[j] / b))
        if reflect:
            s += d[j] * (
                x - b * (_kernel_cdf_integral((x + t[j]) / b) - _kernel_cdf_integral(t[j] / b))
            )
    return s


@njit(cache=True, nogil=True)
def _eval_many(kind, x, t, d, b, reflect, a_eff, H_end, level, out):
    for i in range(x.shape[0]):
        xi = x[i]
        if xi <= a_eff:
            if kind == 0:
                out[i] = _h(xi, t, d, b, reflect)
            elif kind == 1:
                out[i] = _dh(xi, t, d, b, reflect)
            else:
                out[i] = _H(xi, t, d, b, reflect)
        else:
            if kind == 0:
                out[i] = level
            elif kind == 1:
                out[i] = 0.0
            else:
                out[i] = H_end + level * (xi - a_eff)


@njit(cache=True, nogil=True)
def _inverse_many(e, t, d, b, reflect, a_eff, H_end, level, grid_x, grid_H, out):
    # H~ is convex on [0, a_eff], so Newton started right of the root
    # decreases monotonically onto it.
    for i in range(e.shape[0]):
        ei = e[i]
        if ei <= 0.0:
            out[i] = 0.0
            continue
        if ei >= H_end:
            out[i] = a_eff + (ei - H_end) / level
            continue
        k = np.searchsorted(grid_H, ei)
        lo = grid_x[k - 1]
        x = grid_x[k]
        for _ in range(200):
            step = (_H(x, t, d, b, reflect) - ei) / _h(x, t, d, b, reflect)
            xn = x - step
            if xn < lo:
                xn = 0.5 * (lo + x)
            if abs(xn - x) <= 0.1 * INVERSE_XTOL:
                x = xn
                break
            x = xn
        out[i] = x


def default_bandwidth(n, constant=1.0, exponent=-0.25):
    return constant * n**exponent


@dataclass(frozen=True)
class BandwidthDiagnostic:
    ratio: float
    warning: bool
    message: str


def validate_bandwidth(n, bandwidth) -> BandwidthDiagnostic:
    """Silverman ratio ``n b^3 / log(1/b)``; warns when ``b <= n^(-1/3)``."""
    b = float(bandwidth)
    if b <= 0:
        raise ValueError("bandwidth must be positive")
    ratio = n * b**3 / math.log(1.0 / b) if b < 1 else math.inf
    floor = n ** (-1.0 / 3.0)
    warn = b <= floor * (1 + 1e-12)
    msg = (
        f"bandwidth {b:.4g} is at or below n^(-1/3) = {floor:.4g}; "
        "the derivative of the smoothed hazard is not estimated consistently"
        if warn
        else ""
    )
    return BandwidthDiagnostic(ratio, warn, msg)


class SmoothHazard(HazardModel):
    """Kernel-smoothed isotonic hazard, usable as a resampling model."""

    def __init__(self, fit: IsotonicHazardFit, bandwidth, reflect=False):
        b = float(bandwidth)
        if not b > 0:
            raise ValueError("bandwidth must be positive")
        t, mass = fit.atoms()
        keep = mass > 0
        keep[0] = True
        self.base = fit
        self.bandwidth = b
        self.reflect = bool(reflect)
        self.atoms_t = np.ascontiguousarray(t[keep])
        self.atoms_mass = np.ascontiguousarray(mass[keep])
        if not self.atoms_mass[0] > 0:
            raise ValueError("the isotonic fit must have a positive level at 0")
        self.a_eff = float(fit.a_eff)
        args = (self.atoms_t, self.atoms_mass, b, self.reflect)
        self.level = float(_h(self.a_eff, *args))
        self.H_end = float(_H(self.a_eff, *args))
        self._grid_x = np.linspace(0.0, self.a_eff, 129)
        self._grid_H = np.array([_H(v, *args) for v in self._grid_x])

    def __repr__(self):
        return (
            f"SmoothHazard(bandwidth={self.bandwidth}, atoms={self.atoms_t.size}, "
            f"a_eff={self.a_eff}, reflect={self.reflect})"
        )

    @property
    def atoms(self):
        return self.atoms_t, self.atoms_mass

    def _eval(self, kind, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("the smoothed hazard lives on [0, inf)")
        xf = np.ascontiguousarray(x.ravel())
        out = np.empty_like(xf)
        _eval_many(kind, xf, self.atoms_t, self.atoms_mass, self.bandwidth, self.reflect,
                   self.a_eff, self.H_end, self.level, out)
        out = out.reshape(x.shape)
        return float(out) if out.ndim == 0 else out

    def hazard(self, x):
        return self._eval(0, x)

    def hazard_deriv(self, x):
        return self._eval(1, x)

    def cumhaz(self, x):
        return self._eval(2, x)

    def inverse_cumhaz(self, e):
        e = np.asarray(e, dtype=float)
        if np.any(e < 0):
            raise ValueError("cumulative hazard values must be >= 0")
        ef = np.ascontiguousarray(e.ravel())
        out = np.empty_like(ef)
        _inverse_many(ef, self.atoms_t, self.atoms_mass, self.bandwidth, self.reflect,
                      self.a_eff, self.H_end, self.level, self._grid_x, self._grid_H, out)
        out = out.reshape(e.shape)
        return float(out) if out.ndim == 0 else out


def smooth_hazard(fit: IsotonicHazardFit, bandwidth=None, reflect=False) -> SmoothHazard:
    """Smooth ``fit`` with the triweight kernel (default bandwidth ``n^(-1/4)``)."""
    if bandwidth is None:
        bandwidth = default_bandwidth(fit.n)
    return SmoothHazard(fit, bandwidth, reflect=reflect)


def cumhaz(s: SmoothHazard, x):
    return s.cumhaz(x)


def inverse_cumhaz(s: SmoothHazard, e):
    return s.inverse_cumhaz(e)
