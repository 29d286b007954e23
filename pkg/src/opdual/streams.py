"""Seeded random streams with per-trial substreams derived by counter."""

from __future__ import annotations

import numpy as np


def root_stream(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


def substream(seed: int, *counter: int) -> np.random.Generator:
    """Independent generator for trial ``counter`` under ``seed``.

    The same ``(seed, counter)`` always yields the same stream, so trials can be
    evaluated in any order or in parallel.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(counter)))
