"""Reproducible random streams keyed by integer coordinates.

A stream is a Philox counter-based generator whose key is derived from
``(seed, *coords)`` through :class:`numpy.random.SeedSequence`. Draws are
taken in row-major order, so the variate for ``(bootstrap index b, draw
index i)`` sits at counter position ``b * n + i`` of the stream for its
``(seed, grid point, replicate, purpose)`` coordinates. Nothing depends on
which worker evaluates a stream or when.
"""

from __future__ import annotations

import numpy as np

DEFAULT_SEED = 20110617

# Purpose codes used as the last stream coordinate.
DATA = 0
BOOT_SMOOTHED = 1
BOOT_NAIVE = 2
BOOT_EXPONENTIAL = 3


class RngStream:
    """Deterministic variate source for one set of stream coordinates."""

    def __init__(self, seed=DEFAULT_SEED, *coords):
        self.seed = int(seed)
        self.coords = tuple(int(c) for c in coords)
        if self.seed < 0 or any(c < 0 for c in self.coords):
            raise ValueError("seed and stream coordinates must be nonnegative")

    def __repr__(self):
        return f"RngStream(seed={self.seed}, coords={self.coords})"

    def child(self, *coords):
        return RngStream(self.seed, *self.coords, *coords)

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(self.seed, spawn_key=self.coords)
        return np.random.Generator(np.random.Philox(ss))

    def uniforms(self, shape):
        return self.generator().random(shape)

    def exponentials(self, shape):
        """Standard exponentials by inversion, ``E = -log(1 - U)``."""
        return -np.log1p(-self.uniforms(shape))


def exponentials(rng, shape):
    """Standard exponentials from an :class:`RngStream` or a numpy ``Generator``."""
    if isinstance(rng, RngStream):
        return rng.exponentials(shape)
    return -np.log1p(-rng.random(shape))
