"""Seeded random streams.

Every randomised operation draws from a counter-based Philox generator keyed
by an explicit integer seed. Independent sub-streams are split off with
extra integer keys, so results never depend on call order elsewhere.
"""
import numpy as np


def rng_for(seed, *stream) -> np.random.Generator:
    """Philox generator for ``seed``, optionally split into a numbered sub-stream."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))
