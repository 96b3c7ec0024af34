"""Greatest convex minorant (GCM) of finite point diagrams.

Every estimator in the package reduces to the lower convex hull of a
cusum diagram. The hull itself is computed by a single monotone-chain
pass (:func:`lower_hull_indices`), compiled with numba so the batched
statistics in :mod:`isohazard.statistics` can reuse it without the GIL.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

#: Relative slope difference below which three points count as collinear.
COLLINEAR_RTOL = 1e-12


class InvalidDiagramError(ValueError):
    """Raised for diagrams that violate the cusum-diagram invariants."""


class DomainError(ValueError):
    """Raised when a function is evaluated outside its domain."""


@njit(cache=True, nogil=True)
def lower_hull_indices(x, y, out):
    """Write the indices of the lower hull vertices of ``(x, y)`` into ``out``.

    ``x`` must be strictly increasing. Returns the number of vertices; the
    first and last points are always vertices. Middle points within
    ``COLLINEAR_RTOL`` of a chord are dropped.
    """
    m = 0
    for k in range(x.shape[0]):
        while m >= 2:
            i = out[m - 2]
            j = out[m - 1]
            s1 = (y[j] - y[i]) / (x[j] - x[i])
            s2 = (y[k] - y[j]) / (x[k] - x[j])
            if s1 >= s2 - COLLINEAR_RTOL * max(abs(s1), abs(s2)):
                m -= 1
            else:
                break
        out[m] = k
        m += 1
    return m


@dataclass(frozen=True)
class CusumDiagram:
    """Ordered planar points whose GCM defines an isotonic estimator."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).ravel()
        y = np.asarray(self.y, dtype=float).ravel()
        if x.shape != y.shape:
            raise InvalidDiagramError("x and y must have the same length")
        if x.size < 2:
            raise InvalidDiagramError("a cusum diagram needs at least 2 points")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidDiagramError("diagram coordinates must be finite")
        if np.any(np.diff(x) <= 0):
            raise InvalidDiagramError("diagram x-coordinates must be strictly increasing")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_points(cls, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidDiagramError("points must be a sequence of (x, y) pairs")
        return cls(pts[:, 0], pts[:, 1])

    def __len__(self):
        return self.x.size

    def chord_slopes(self):
        return np.diff(self.y) / np.diff(self.x)


@dataclass(frozen=True)
class PiecewiseLinearFn:
    """Continuous piecewise-linear function on ``[knots_x[0], knots_x[-1]]``."""

    knots_x: np.ndarray
    knots_y: np.ndarray

    def __post_init__(self):
        kx = np.asarray(self.knots_x, dtype=float).ravel()
        ky = np.asarray(self.knots_y, dtype=float).ravel()
        if kx.shape != ky.shape or kx.size < 2:
            raise InvalidDiagramError("need at least 2 knots with matching coordinates")
        if np.any(np.diff(kx) <= 0):
            raise InvalidDiagramError("knots must be strictly increasing in x")
        kx.setflags(write=False)
        ky.setflags(write=False)
        object.__setattr__(self, "knots_x", kx)
        object.__setattr__(self, "knots_y", ky)

    @property
    def domain(self):
        return float(self.knots_x[0]), float(self.knots_x[-1])

    @property
    def knots(self):
        return list(zip(self.knots_x.tolist(), self.knots_y.tolist()))

    @property
    def slopes(self):
        return np.diff(self.knots_y) / np.diff(self.knots_x)

    def _check(self, x, lo_open=False, hi_open=False):
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        bad = (x < lo) | (x > hi) | ~np.isfinite(x)
        if lo_open:
            bad |= x == lo
        if hi_open:
            bad |= x == hi
        if np.any(bad):
            raise DomainError(f"argument outside the domain [{lo}, {hi}]")
        return x

    def __call__(self, x):
        x = self._check(x)
        out = np.interp(x, self.knots_x, self.knots_y)
        return float(out) if out.ndim == 0 else out

    def left_derivative(self, x):
        """Slope of the segment immediately left of ``x`` (``x`` in ``(lo, hi]``)."""
        x = self._check(x, lo_open=True)
        idx = np.searchsorted(self.knots_x, x, side="left") - 1
        out = self.slopes[idx]
        return float(out) if out.ndim == 0 else out

    def right_derivative(self, x):
        """Slope of the segment immediately right of ``x`` (``x`` in ``[lo, hi)``)."""
        x = self._check(x, hi_open=True)
        idx = np.searchsorted(self.knots_x, x, side="right") - 1
        out = self.slopes[idx]
        return float(out) if out.ndim == 0 else out

    def inverse(self, y):
        """Generalized inverse ``inf{x : f(x) >= y}`` of a nondecreasing function."""
        if np.any(np.diff(self.knots_y) < 0):
            raise DomainError("inverse requires a nondecreasing function")
        y = np.asarray(y, dtype=float)
        lo_y, hi_y = self.knots_y[0], self.knots_y[-1]
        if np.any((y < lo_y) | (y > hi_y)):
            raise DomainError(f"value outside the range [{lo_y}, {hi_y}]")
        kx, ky = self.knots_x, self.knots_y
        k = np.searchsorted(ky, y, side="left")
        k = np.clip(k, 1, ky.size - 1)
        dy = ky[k] - ky[k - 1]
        frac = np.where(dy > 0, (y - ky[k - 1]) / np.where(dy > 0, dy, 1.0), 0.0)
        out = kx[k - 1] + frac * (kx[k] - kx[k - 1])
        out = np.where(y <= lo_y, kx[0], out)
        return float(out) if out.ndim == 0 else out


def gcm(diagram: CusumDiagram) -> PiecewiseLinearFn:
    """Greatest convex minorant of the linear interpolation of ``diagram``.

    The knots are a subset of the diagram points and always include the
    first and last point.
    """
    if not isinstance(diagram, CusumDiagram):
        diagram = CusumDiagram.from_points(diagram)
    idx = np.empty(len(diagram), dtype=np.int64)
    m = lower_hull_indices(diagram.x, diagram.y, idx)
    idx = idx[:m]
    return PiecewiseLinearFn(diagram.x[idx], diagram.y[idx])


def left_derivative(f: PiecewiseLinearFn, x):
    return f.left_derivative(x)


def right_derivative(f: PiecewiseLinearFn, x):
    return f.right_derivative(x)


def gcm_slopes_as_isotonic(diagram: CusumDiagram):
    """GCM right-derivative as a list of ``((lo, hi), slope)`` pieces.

    This is the weighted isotonic regression of the diagram's chord slopes
    with weights equal to the x-gaps.
    """
    f = gcm(diagram)
    kx = f.knots_x
    return [((float(kx[k]), float(kx[k + 1])), float(s)) for k, s in enumerate(f.slopes)]


def isotonic_slopes_per_gap(diagram: CusumDiagram) -> np.ndarray:
    """GCM slope assigned to every gap ``(x_i, x_{i+1})`` of the diagram."""
    if not isinstance(diagram, CusumDiagram):
        diagram = CusumDiagram.from_points(diagram)
    f = gcm(diagram)
    mids = 0.5 * (diagram.x[:-1] + diagram.x[1:])
    return f.right_derivative(mids)
