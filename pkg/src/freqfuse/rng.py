"""SplitMix64: a small, portable 64-bit-state generator.

Reference: Steele, Lea & Flood, "Fast splittable pseudorandom number
generators" (OOPSLA 2014); constants as in Vigna's public-domain C version.
Every draw here is defined on unsigned 64-bit integers so the same seed
gives the same stream in any language.
"""

from __future__ import annotations

__all__ = ["SplitMix64", "derive_seed", "mix64"]

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Seed for sub-stream ``index``: the ``index+1``-th output of
    ``SplitMix64(master_seed)``, computed without stepping through the stream."""
    if index < 0:
        raise ValueError("index must be non-negative")
    return mix64((master_seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def sample(self, population, k: int) -> list:
        """``k`` distinct items, in draw order, via partial Fisher-Yates."""
        pool = list(population)
        if not 0 <= k <= len(pool):
            raise ValueError(f"cannot draw {k} items from {len(pool)}")
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
