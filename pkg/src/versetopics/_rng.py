"""Counter-based deterministic random number generation.

The layout optimizer needs random draws that are reproducible across
platforms and across runs without carrying mutable generator state
through the inner loop.  A SplitMix64 hash of (seed, counter) gives a
pure function from a 128-bit input to a 64-bit output with good
statistical quality, so every consumer can derive its stream from a
seed and a monotonically increasing counter.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


def splitmix64(seed: int, counter: int) -> int:
    """Return a 64-bit hash of (seed, counter); pure and platform-stable."""
    z = (seed * 0x9E3779B97F4A7C15 + counter * 0xBF58476D1CE4E5B9 + 0x94D049BB133111EB) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def rand_uniform(seed: int, counter: int) -> float:
    """Uniform float in [0, 1) derived from splitmix64(seed, counter)."""
    return splitmix64(seed, counter) / float(1 << 64)


def rand_int(seed: int, counter: int, n: int) -> int:
    """Integer in [0, n) derived from splitmix64(seed, counter).

    Modulo bias is negligible for n far below 2**64, which holds for
    every use here (n is a point count).
    """
    return splitmix64(seed, counter) % n
