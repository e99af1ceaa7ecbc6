"""Deterministic 64-bit seed derivation.

Per-trial seeds are ``trial_seed(master, cell, trial)``, built from the
SplitMix64 finalizer, so results never depend on worker scheduling.
"""

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(master: int, cell: int, trial: int) -> int:
    return splitmix64(splitmix64(splitmix64(master & MASK64) ^ cell) ^ trial)
