"""Deterministic, portable random number generation.

The generator is counter-based SplitMix64: output(i) = mix64(seed + (i+1)*GAMMA)
with GAMMA = 0x9E3779B97F4A7C15 and

    mix64(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
              z ^= z >> 27; z *= 0x94D049BB133111EB;
              z ^= z >> 31

(all arithmetic mod 2^64). Uniform doubles take the top 53 bits: (z >> 11) * 2^-53.
Normals are Box-Muller over consecutive uniform pairs. Because the stream is a
pure function of (seed, counter), scalar and vectorized draws agree exactly and
any run is reproducible from the seed alone.
"""
from __future__ import annotations

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def _mix(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    z = z ^ (z >> np.uint64(31))
    return z


class Rng:
    """Seedable stream; every draw advances a 64-bit counter."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK
        self.counter = 0

    def _raw(self, count: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + count + 1, dtype=np.uint64)
        self.counter += count
        return _mix(np.uint64(self.seed) + idx * np.uint64(_GAMMA))

    def next_u64(self) -> int:
        return int(self._raw(1)[0])

    def uniform(self, shape, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        size = int(np.prod(shape)) if shape else 1
        u = (self._raw(size) >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)
        return (low + (high - low) * u).reshape(shape)

    def normal(self, shape, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
        size = int(np.prod(shape)) if shape else 1
        pairs = (size + 1) // 2
        u1 = 1.0 - self.uniform((pairs,))  # (0, 1]: keeps log() finite
        u2 = self.uniform((pairs,))
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.empty(pairs * 2, dtype=np.float64)
        out[0::2] = r * np.cos(2.0 * np.pi * u2)
        out[1::2] = r * np.sin(2.0 * np.pi * u2)
        return (mean + std * out[:size]).reshape(shape)

    def below(self, n: int) -> int:
        """Integer in [0, n); modulo of a 64-bit draw (bias negligible for small n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def choice(self, items: list):
        return items[self.below(len(items))]
