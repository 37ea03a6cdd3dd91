"""Seeded random streams.

A stream is a pure function of a 64-bit seed: the seed is used directly as
the key of a Philox4x64 counter-based generator. Replication ``i`` of an
experiment with base seed ``s`` uses seed ``s ^ splitmix64(i)``, where

    z = (i + 0x9E3779B97F4A7C15)            mod 2**64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    splitmix64(i) = z ^ (z >> 31)
"""

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    z = (int(x) + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def replication_seed(base_seed: int, i: int) -> int:
    return (int(base_seed) & MASK64) ^ splitmix64(i)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & MASK64))


def open_uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform draws on the open interval (0, 1), 53 bits each."""
    k = rng.integers(0, 1 << 53, size=n, dtype=np.int64)
    return (k + 0.5) * 2.0**-53
