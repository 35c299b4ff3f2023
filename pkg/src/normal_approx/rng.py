"""Seeded, counter-based random number generation.

All randomness in this package flows through SplitMix64, a 64-bit
counter-based generator: output ``j`` for seed ``s`` is
``mix64(s + (j + 1) * GOLDEN_GAMMA)`` where ``mix64`` is the finalizer
below. The constants are fixed forever:

    GOLDEN_GAMMA = 0x9E3779B97F4A7C15
    mix64(z):  z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
               z ^= z >> 27;  z *= 0x94D049BB133111EB
               z ^= z >> 31

Because each output is a pure function of (seed, counter), streams are
reproducible byte-for-byte and independent draws can be sliced out of the
middle of a stream. Gaussian variates use the cosine branch of the
Box-Muller transform on two consecutive uniforms; complex Gaussians are
(x + iy)/sqrt(2) so that E|z|^2 = 1. Parallel workers derive disjoint
streams with ``derive_seed``.
"""

import numpy as np

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_1 = 0xBF58476D1CE4E5B9
_MIX_2 = 0x94D049BB133111EB
_MASK = 0xFFFFFFFFFFFFFFFF


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int, reduced modulo 2^64."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX_1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX_2) & _MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Child seed for parallel stream ``index``: mix64(seed XOR mix64((index+1)*GAMMA))."""
    if index < 0:
        raise ValueError("stream index must be nonnegative")
    return mix64((seed & _MASK) ^ mix64(((index + 1) * GOLDEN_GAMMA) & _MASK))


def _mix64_array(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_2)
        return z ^ (z >> np.uint64(31))


class CounterRng:
    """Deterministic stream of SplitMix64 outputs for one 64-bit seed."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self._counter = 0

    def raw(self, count: int) -> np.ndarray:
        """Next ``count`` raw 64-bit outputs as a uint64 array."""
        idx = np.arange(self._counter + 1, self._counter + count + 1, dtype=np.uint64)
        self._counter += count
        with np.errstate(over="ignore"):
            z = np.uint64(self.seed) + idx * np.uint64(GOLDEN_GAMMA)
        return _mix64_array(z)

    def uniform(self, size: int) -> np.ndarray:
        """Uniforms in [0, 1) with 53-bit resolution."""
        return (self.raw(size) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniform_open(self, size: int) -> np.ndarray:
        """Uniforms in (0, 1]; safe as the log argument in Box-Muller."""
        return ((self.raw(size) >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * 2.0**-53

    def uniform_range(self, lo: float, hi: float, size: int) -> np.ndarray:
        return lo + (hi - lo) * self.uniform(size)

    def standard_normal(self, size: int) -> np.ndarray:
        u1 = self.uniform_open(size)
        u2 = self.uniform(size)
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

    def complex_normal(self, size: int) -> np.ndarray:
        """Standard complex Gaussian: real and imaginary N(0, 1/2)."""
        x = self.standard_normal(size)
        y = self.standard_normal(size)
        return (x + 1j * y) / np.sqrt(2.0)

    def complex_matrix(self, rows: int, cols: int) -> np.ndarray:
        return self.complex_normal(rows * cols).reshape(rows, cols)
