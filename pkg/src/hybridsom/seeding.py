"""Deterministic seed derivation.

All randomness in the package flows from one master seed. Independent
streams are derived with a splitmix64 finalizer so that, for example, the
SOM of month 3 gets the same stream no matter how many other months run or
in which order.

    mix(seed, a, b, ...) = sm(...sm(sm(seed) ^ a) ^ b ...)

where ``sm`` is the splitmix64 step (increment 0x9E3779B97F4A7C15, then the
Stafford variant 13 finalizer).
"""

import numpy as np

MASK64 = (1 << 64) - 1

# stage tags used by the pipeline
TAG_SOM = 1
TAG_SWEEP = 2
TAG_FINAL = 3


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def mix(seed: int, *parts: int) -> int:
    """Derive a 64-bit seed from ``seed`` and any number of integer tags."""
    h = splitmix64(int(seed) & MASK64)
    for p in parts:
        h = splitmix64(h ^ (int(p) & MASK64))
    return h


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))
