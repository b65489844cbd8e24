"""Pinned pseudo-random generator used for splits and synthetic noise.

Everything here is specified down to the constants so that other
implementations can reproduce the exact same shuffles and noise draws:

* seeding: ``state = splitmix64(seed mod 2**64)``; a zero state is replaced
  by ``0x9E3779B97F4A7C15``.
* step: xorshift64* (shifts 12, 25, 27; output multiplier
  ``0x2545F4914F6CDD1D``).
* uniform in [0, 1): ``(next_u64() >> 11) * 2**-53``.
* integer in [0, bound): ``next_u64() % bound``.
* normal: Box-Muller, cosine branch only, ``u1 = 1 - uniform()``,
  ``u2 = uniform()``, ``sqrt(-2 ln u1) * cos(2 pi u2)``.
* shuffle: Fisher-Yates from the last index down,
  ``j = below(i + 1)`` for ``i = n-1 .. 1``.
* per-month sub-seed: ``splitmix64(seed ^ (month * 0x9E3779B97F4A7C15 mod 2**64))``.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_seed(seed: int, stream: int) -> int:
    return splitmix64((seed & MASK64) ^ ((stream * GOLDEN) & MASK64))


class XorShift64Star:
    def __init__(self, seed: int):
        self.state = splitmix64(seed & MASK64) or GOLDEN

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK64

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, bound: int) -> int:
        # Modulo bias is < bound / 2**64, irrelevant at dataset sizes.
        return self.next_u64() % bound

    def normal(self) -> float:
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def permutation(self, n: int) -> list[int]:
        out = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            out[i], out[j] = out[j], out[i]
        return out
