"""Seeded random number generator with a fixed, documented algorithm.

Batch order, layout initialization and every other stochastic choice in this
package must replay identically for a given seed, on any platform. Library
generators do not promise a stable stream across versions, so we pin one:

* state initialization: splitmix64 applied four times to the 64-bit seed,
  ``z = (x += 0x9E3779B97F4A7C15); z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
  z = (z ^ z>>27) * 0x94D049BB133111EB; return z ^ z>>31``
* stream: xoshiro256** — ``result = rotl(s1 * 5, 7) * 9``, then
  ``t = s1 << 17; s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t;
  s3 = rotl(s3, 45)`` (all mod 2^64).

Frozen output vectors live in tests/test_rng.py.
"""

from __future__ import annotations

import math

MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64_stream(seed: int, count: int) -> list[int]:
    """First `count` outputs of splitmix64 starting from `seed`."""
    out = []
    x = seed & MASK64
    for _ in range(count):
        x = (x + 0x9E3779B97F4A7C15) & MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        out.append(z ^ (z >> 31))
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** seeded through splitmix64."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        s = splitmix64_stream(self.seed, 4)
        self._s = s
        self._gauss_spare = None

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def below(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        limit = (MASK64 + 1) - (MASK64 + 1) % n
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def shuffle(self, seq) -> None:
        """In-place Fisher–Yates; accepts lists and 1-d numpy arrays."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.below(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def gauss(self) -> float:
        """Standard normal via Box–Muller (polar form avoided: determinism
        favours the fixed two-per-call variant)."""
        if self._gauss_spare is not None:
            z = self._gauss_spare
            self._gauss_spare = None
            return z
        # u1 in (0,1] so log() is finite
        u1 = 1.0 - self.random()
        u2 = self.random()
        r = math.sqrt(-2.0 * math.log(u1))
        self._gauss_spare = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)

    def normal_matrix(self, rows: int, cols: int):
        import numpy as np

        return np.array(
            [[self.gauss() for _ in range(cols)] for _ in range(rows)],
            dtype=np.float64,
        )

    def spawn(self, tag: int) -> "Xoshiro256StarStar":
        """Derive an independent child generator (seed mixed with tag)."""
        mixed = splitmix64_stream((self.seed ^ (tag * 0x9E3779B97F4A7C15)) & MASK64, 1)[0]
        return Xoshiro256StarStar(mixed)
