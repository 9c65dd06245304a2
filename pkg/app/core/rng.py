"""Seeded random sources.

A ``SeededRandomSource`` is a ``numpy.random.Generator``. Streams are derived
from the master seed with ``SeedSequence`` spawn keys so each consumer owns an
independent, reproducible stream regardless of execution order.
"""

import numpy as np

SeededRandomSource = np.random.Generator

CODEBOOK_STREAM = 0
TRIAL_STREAM = 1


def derive_rng(seed: int, *key: int) -> SeededRandomSource:
    """Independent stream for ``key`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def codebook_rng(seed: int) -> SeededRandomSource:
    return derive_rng(seed, CODEBOOK_STREAM)


def trial_rng(seed: int, trial: int) -> SeededRandomSource:
    return derive_rng(seed, TRIAL_STREAM, trial)
