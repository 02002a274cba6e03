"""Deterministic pseudo-randomness with splittable child streams.

Every randomized routine in the package takes an :class:`Rng`.  The
generator is Philox, a counter-based bit generator, keyed through
``numpy.random.SeedSequence`` with the 64-bit root seed as entropy and the
derivation path as spawn key.  Two streams with different paths are
statistically independent, and any stream is fully determined by
``(seed, path)``, so parallel trials need no coordination: worker ``i``
simply uses ``derive(seed, i)``.

Bit-exact reproducibility is guaranteed within one installation (same
numpy); the statistical contracts of the callers do not rely on exact
stream values across versions.
"""

from __future__ import annotations

import numpy as np

from .validation import check_nonnegative, check_positive_int

_MASK64 = (1 << 64) - 1


class Rng:
    """Seeded random stream supporting deterministic splitting.

    Parameters
    ----------
    seed : int
        Root seed, reduced modulo 2**64.
    path : tuple of int, optional
        Derivation path; ``()`` is the root stream.
    """

    __slots__ = ("seed", "path", "_gen")

    def __init__(self, seed, path=()):
        self.seed = int(seed) & _MASK64
        self.path = tuple(int(p) for p in path)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self._gen = np.random.Generator(np.random.Philox(ss))

    def child(self, index) -> "Rng":
        """Independent stream keyed by this stream's path extended by ``index``."""
        return Rng(self.seed, self.path + (int(index),))

    def standard_normal(self, shape) -> np.ndarray:
        return self._gen.standard_normal(shape)

    def gaussian(self, shape, variance) -> np.ndarray:
        variance = check_nonnegative(variance, "variance")
        if variance == 0.0:
            return np.zeros(shape, dtype=np.float64)
        return self._gen.normal(0.0, np.sqrt(variance), shape)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def unit_vector(self, dim) -> np.ndarray:
        """Uniform direction on the unit sphere in R^dim."""
        dim = check_positive_int(dim, "dim")
        while True:
            v = self._gen.standard_normal(dim)
            norm = np.linalg.norm(v)
            if norm > 0:
                return v / norm

    def __repr__(self):
        return f"Rng(seed={self.seed}, path={self.path})"


def derive(seed, index) -> Rng:
    """Child stream ``index`` of the root stream with the given ``seed``."""
    return Rng(seed).child(index)


def gaussian_matrix(rng: Rng, rows, cols, variance) -> np.ndarray:
    """Matrix with i.i.d. zero-mean Gaussian entries of the given variance."""
    rows = check_positive_int(rows, "rows")
    cols = check_positive_int(cols, "cols")
    return rng.gaussian((rows, cols), variance)


def gaussian_vector(rng: Rng, dim, variance) -> np.ndarray:
    dim = check_positive_int(dim, "dim")
    return rng.gaussian(dim, variance)
