"""Deterministic 64-bit pseudo-random generator (SplitMix64).

Every random choice in this package flows through the generator defined
here, so results are reproducible bit-for-bit across platforms and across
the scalar / vectorized code paths.  The algorithm is pinned:

    state_i = (seed + i * GAMMA) mod 2**64          (i = 1, 2, 3, ...)
    out_i   = mix(state_i)

    mix(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9 (mod 2**64)
            z ^= z >> 27; z *= 0x94D049BB133111EB (mod 2**64)
            z ^= z >> 31

    GAMMA = 0x9E3779B97F4A7C15

Derived quantities:

* 53-bit uniform: u53_i = out_i >> 11, a float in [0, 1) is u53_i / 2**53.
* bounded integer in [0, m): (u53_i * m) >> 53 using exact integer math.
* child stream for tag t: child_seed = mix(seed ^ mix((t + 1) * GAMMA)).

Because out_i depends only on (seed, i), whole key streams can be produced
with numpy in one shot; the vectorized helpers below are bit-identical to
the sequential class.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15

_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB
_TWO53 = float(1 << 53)


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def child_seed(seed: int, tag: int) -> int:
    """Derive an independent stream seed for a labelled sub-task."""
    return mix64((seed & MASK64) ^ mix64(((tag + 1) * GAMMA) & MASK64))


class SplitMix64:
    """Sequential view of the pinned generator."""

    def __init__(self, seed: int):
        self._seed = seed & MASK64
        self._i = 0

    def next_u64(self) -> int:
        self._i += 1
        return mix64((self._seed + self._i * GAMMA) & MASK64)

    def next_float(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) / _TWO53

    def randbelow(self, m: int) -> int:
        """Uniform-enough integer in [0, m); bias is < m / 2**53."""
        if m <= 0:
            raise ValueError("randbelow needs m >= 1")
        return ((self.next_u64() >> 11) * m) >> 53

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates using the pinned generator."""
        n = len(items)
        for i in range(n - 1):
            j = i + self.randbelow(n - i)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n) via partial Fisher-Yates."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        picked: dict[int, int] = {}
        out = []
        for i in range(k):
            j = i + self.randbelow(n - i)
            vi = picked.get(i, i)
            vj = picked.get(j, j)
            out.append(vj)
            picked[j] = vi
        return out


def key_stream(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Outputs out_{start+1} .. out_{start+count} as a uint64 array.

    Bit-identical to calling SplitMix64(seed).next_u64() count times after
    discarding the first `start` outputs.
    """
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = (np.uint64(seed & MASK64) + idx * np.uint64(GAMMA)).astype(np.uint64)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MUL1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MUL2)
    z ^= z >> np.uint64(31)
    return z


def float_stream(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Uniform floats in [0, 1) matching SplitMix64.next_float()."""
    return (key_stream(seed, count, start) >> np.uint64(11)).astype(np.float64) / _TWO53
