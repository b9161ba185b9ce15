"""Deterministic seed derivation for nested Monte Carlo streams.

Every random stream in this package is a ``numpy.random.default_rng`` seeded
through :func:`mix_seed`, so a run is reproducible from a single base seed.
The mixer is a splitmix64 fold: ``mix_seed(a, b, c) == mix_seed(mix_seed(a, b), c)``,
which lets a sweep hand each cell a seed and each cell hand each trial a seed
without the streams colliding.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 step; maps a 64-bit integer to a well-mixed 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(seed: int, *parts: int) -> int:
    """Fold integer labels into a base seed.

    Left fold, so partial application composes: deriving a cell seed and then
    a trial seed from it equals deriving the trial seed in one call.
    """
    h = seed & _MASK64
    for p in parts:
        h = splitmix64(h ^ splitmix64(p & _MASK64))
    return h


def rng_for(seed: int, *parts: int) -> np.random.Generator:
    """Generator for the stream labeled by ``parts`` under ``seed``."""
    return np.random.default_rng(mix_seed(seed, *parts))
