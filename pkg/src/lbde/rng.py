"""Seeded random streams.

All randomness flows through numpy ``Generator`` objects backed by the
counter-based Philox engine.  Independent streams are derived by splitting a
master ``SeedSequence``, never by sharing a generator: a generator instance is
owned by exactly one chain and must stay confined to the thread driving it.
Identical seeds give bit-identical draw sequences on the same build.
"""
from __future__ import annotations

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """Generator with a reproducible, seed-determined stream."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def split_rng(seed: int, n: int) -> list[np.random.Generator]:
    """``n`` mutually independent generators derived from one master seed."""
    children = np.random.SeedSequence(int(seed)).spawn(int(n))
    return [np.random.Generator(np.random.Philox(c)) for c in children]
