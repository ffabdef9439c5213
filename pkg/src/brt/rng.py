"""Deterministic random stream for stochastic subsampling.

Cross-platform reproducibility matters more here than statistical
sophistication: the generator is splitmix64 (Steele, Lea & Flood's
reference constants), a 64-bit mixer whose output for a given seed is
identical on every OS, CPU, and Python build. Fitting a model twice
with the same seed must produce byte-identical results, so nothing in
this package draws randomness from any other source.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64 stream. Seeds are taken modulo 2**64."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Integer in [0, n) by multiply-shift; bias < n/2**64, negligible here."""
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next_u64() * n) >> 64

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53


def sample_without_replacement(n: int, k: int, rng: SplitMix64) -> list[int]:
    """First k entries of a partial Fisher-Yates pass over range(n), sorted.

    Consumes exactly k draws from the stream. The result is sorted so that
    downstream summation order does not depend on draw order.
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    idx = list(range(n))
    for i in range(k):
        j = i + rng.below(n - i)
        idx[i], idx[j] = idx[j], idx[i]
    head = idx[:k]
    head.sort()
    return head
