"""Counter-based random streams keyed by (master seed, replicate, role).

Each replicate owns two Philox streams, one for scrambling/generating
matrices and one for digital shifts.  Inside a stream, dimension ``j``
consumes the ``j``-th fixed-size block of counters, so the first ``s'``
coordinates of an ``s``-dimensional net coincide with an ``s'``-dimensional
net drawn from the same key.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

MATRIX_ROLE = 0
SHIFT_ROLE = 1


class WordSource(Protocol):
    def random_raw(self, size=None): ...


def stream_key(master_seed: int, *path: int) -> np.ndarray:
    """Two uint64 words hashing ``(master_seed, *path)`` through SeedSequence."""
    ss = np.random.SeedSequence(entropy=int(master_seed) & (2**64 - 1), spawn_key=tuple(int(p) for p in path))
    return ss.generate_state(2, dtype=np.uint64)


def philox(master_seed: int, *path: int) -> np.random.Philox:
    return np.random.Philox(key=stream_key(master_seed, *path))


@dataclass
class ReplicateStreams:
    matrix: WordSource
    shift: WordSource

    @classmethod
    def derive(cls, master_seed: int, replicate: int) -> ReplicateStreams:
        return cls(
            matrix=philox(master_seed, replicate, MATRIX_ROLE),
            shift=philox(master_seed, replicate, SHIFT_ROLE),
        )


def draw_words(source: WordSource, s: int, per_dim: int) -> np.ndarray:
    """``(s, per_dim)`` uint64 words; row ``j`` is the ``j``-th counter block."""
    raw = np.asarray(source.random_raw(s * per_dim), dtype=np.uint64)
    return raw.reshape(s, per_dim)


def cell_seed(master_seed: int, *labels: int) -> int:
    """A 64-bit seed for one experiment cell, independent across label tuples."""
    return int(stream_key(master_seed, *labels)[0])
