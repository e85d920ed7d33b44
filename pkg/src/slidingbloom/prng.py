"""Deterministic seeding and mixing utilities.

Every piece of internal randomness (hash multiplier draw, bucket
offsets, cuckoo walk choices) flows through splitmix64, so a run is
reproducible from one integer seed on any platform and the entire
generator state fits in a single 64-bit word (which keeps snapshots
trivial). The generator identity is part of the reproducibility
contract documented in the README.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def splitmix64(x: int) -> int:
    """One splitmix64 output step, usable as a stateless 64-bit mixer."""
    x = (x + _GAMMA) & MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & MASK64
    return x ^ (x >> 31)


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash. Used for label separation and CLI token hashing."""
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & MASK64
    return h


def derive_seed(seed: int, label: str) -> int:
    """Domain-separated child seed: independent streams per label."""
    return splitmix64((seed & MASK64) ^ fnv1a64(label.encode("utf-8")))


class SplitMix64:
    """Seedable PRNG whose whole state is one 64-bit integer."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next64(self) -> int:
        s = (self.state + _GAMMA) & MASK64
        self.state = s
        s = ((s ^ (s >> 30)) * _MIX1) & MASK64
        s = ((s ^ (s >> 27)) * _MIX2) & MASK64
        return s ^ (s >> 31)

    def below(self, n: int) -> int:
        """Uniform draw from [0, n) by rejection (no modulo bias).

        Works for any positive n, including beyond 2**64: draws just
        enough 64-bit words, truncates to the bit width of n-1, and
        rejects overshoots (acceptance probability > 1/2).
        """
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        if n == 1:
            return 0
        k = (n - 1).bit_length()
        words = (k + 63) // 64
        shift = words * 64 - k
        while True:
            v = 0
            for _ in range(words):
                v = (v << 64) | self.next64()
            v >>= shift
            if v < n:
                return v
