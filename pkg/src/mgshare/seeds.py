"""Deterministic seed derivation.

Every random draw in the package flows from a numpy Generator seeded through
`child_seed`, a splitmix64 chain over integer coordinates. Two runs with the
same master seed and the same coordinates see identical streams regardless of
execution order or process layout, which is what makes parallel runs
byte-for-byte reproducible.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GAMMA) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def child_seed(*coords: int) -> int:
    """Mix integer coordinates into a 64-bit seed.

    Typical use: child_seed(master_seed, sweep_index, scenario_index).
    Negative coordinates are folded into the 64-bit ring.
    """
    state = 0x5DEECE66D
    for c in coords:
        state = _splitmix64(state ^ (int(c) & _MASK))
    return state


def rng_for(*coords: int) -> np.random.Generator:
    return np.random.default_rng(child_seed(*coords))
