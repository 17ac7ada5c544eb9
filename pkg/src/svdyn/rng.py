"""Deterministic 64-bit mix-and-multiply generator with splittable seeding.

All randomized operations in the toolkit draw from this generator so that a
recorded seed reproduces a run bit-for-bit on any platform.  The update is
the splitmix construction: add an odd constant, then two xor-shift-multiply
rounds.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Sequential 64-bit generator; `split` derives independent streams."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def choice(self, seq):
        return seq[self.next_below(len(seq))]

    def split(self, tag: int) -> "SplitMix64":
        """Child generator for stream `tag`; independent of later draws."""
        base = (self._state + (tag + 1) * _GOLDEN) & _MASK
        z = ((base ^ (base >> 30)) * _MIX1) & _MASK
        return SplitMix64(z)
