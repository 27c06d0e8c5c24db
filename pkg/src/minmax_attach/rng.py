"""Seeded, platform-stable random streams.

Uniform variates come from numpy's ``PCG64`` bit generator, whose raw
64-bit output is fixed for a given seed across numpy releases. Normal
variates are produced here by inverse-transform sampling rather than by
``Generator.standard_normal``, whose algorithm numpy may change between
versions. The combination is identified by ``STREAM_VERSION``.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

__all__ = ["STREAM_VERSION", "RandomStream", "check_seed"]

STREAM_VERSION = "pcg64-ndtri-1"

_TWO_POW_53 = float(2**53)


def check_seed(seed) -> int:
    """Return ``seed`` as an int, or raise if it is not a 64-bit unsigned value."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


class RandomStream:
    """A reproducible source of uniform, normal and categorical draws.

    Parameters
    ----------
    seed : int
        64-bit unsigned seed. Two streams built from the same seed produce
        bit-identical sequences.

    Notes
    -----
    A uniform is ``(k + 0.5) / 2**53`` where ``k`` is the top 53 bits of a
    raw PCG64 output, so it lies strictly inside (0, 1). A standard normal
    is ``ndtri(u)`` for one such uniform.
    """

    version = STREAM_VERSION

    def __init__(self, seed: int):
        self.seed = check_seed(seed)
        self._bits = np.random.PCG64(self.seed)

    def uniform(self, size: int) -> np.ndarray:
        raw = self._bits.random_raw(size)
        return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) / _TWO_POW_53

    def standard_normal(self, size: int) -> np.ndarray:
        return ndtri(self.uniform(size))

    def categorical(self, probs, size: int) -> np.ndarray:
        """Draw ``size`` indices from the distribution ``probs`` by inverse CDF."""
        cdf = np.cumsum(np.asarray(probs, dtype=np.float64))
        u = self.uniform(size) * cdf[-1]
        idx = np.searchsorted(cdf, u, side="right")
        # u can round onto cdf[-1]; zero-probability tail entries must not be hit
        return np.minimum(idx, np.flatnonzero(cdf < cdf[-1]).size)
