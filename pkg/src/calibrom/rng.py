"""Deterministic pseudo-random numbers for weight init and parameter sampling.

The generator is xoshiro256++ seeded through splitmix64, implemented on plain
Python integers so sequences are identical on every platform.

splitmix64 (state s, all arithmetic mod 2**64):

    s += 0x9E3779B97F4A7C15
    z  = s
    z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)

xoshiro256++ (state s0..s3; rotl(x, k) is a 64-bit left rotation):

    out = rotl(s0 + s3, 23) + s0
    t   = s1 << 17
    s2 ^= s0;  s3 ^= s1;  s1 ^= s2;  s0 ^= s3;  s2 ^= t
    s3  = rotl(s3, 45)

The four state words are the first four splitmix64 outputs for the seed.
Uniform doubles on [0, 1) take the top 53 bits: (out >> 11) * 2**-53.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


def _splitmix64_stream(seed: int, count: int) -> list[int]:
    s = int(seed) & _MASK64
    out = []
    for _ in range(count):
        s = (s + 0x9E3779B97F4A7C15) & _MASK64
        z = s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out.append(z ^ (z >> 31))
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256pp:
    """xoshiro256++ stream; see the module docstring for the exact algorithm."""

    def __init__(self, seed: int):
        s = _splitmix64_stream(seed, 4)
        if not any(s):
            s[0] = 1  # the all-zero state is a fixed point of xoshiro
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        out = (_rotl((s0 + s3) & _MASK64, 23) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return out

    def random(self) -> float:
        """Uniform double on [0, 1)."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()
