"""Seeded, splittable random streams.

One counter-based generator (Philox) per logical stream, derived from a user
seed plus string tags, so every suite and module draws from an independent,
reproducible stream regardless of call order.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _tag_entropy(tag: str) -> int:
    return int.from_bytes(hashlib.sha256(tag.encode("utf-8")).digest()[:8], "little")


def stream(seed: int, *tags: str) -> np.random.Generator:
    """An independent generator for (seed, tags); same inputs, same stream."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_tag_entropy(t) for t in tags]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
