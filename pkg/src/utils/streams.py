"""Deterministic random streams.

Every stream is keyed by (master seed, spawn key, label). The spawn key is the
path (trial, stage, copy, ...) and the label names the consumer ("samples",
"selection", "init", ...), so drawing from one consumer never shifts another.
"""

from __future__ import annotations

import zlib

import numpy as np


def _label_key(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


class RandomStreams:
    """Labeled sub-streams of one trial (or one ensemble copy)."""

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        self.samples = self.generator("samples")
        self.selection = self.generator("selection")

    def __repr__(self) -> str:
        return f"RandomStreams(seed={self.seed}, key={self.key})"

    def generator(self, label: str) -> np.random.Generator:
        """Returns a fresh generator for `label`. Same label, same sequence."""
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.key + (_label_key(label),))
        return np.random.default_rng(sequence)

    def spawn(self, *key: int) -> RandomStreams:
        """Streams for a child computation, e.g. copy j of stage t."""
        return RandomStreams(self.seed, self.key + tuple(key))
