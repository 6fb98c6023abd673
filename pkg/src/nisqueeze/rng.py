"""Named random streams derived from one root seed.

Every consumer asks for a stream by name (``"generator"``, ``"trainer.init"``, ``"ei"`` ...), optionally
with an index (batch number, q). Streams are `Philox` counter-based generators keyed by a
`SeedSequence`, so re-running any part of a pipeline with the same root seed reproduces it exactly,
independent of which other streams were consumed before.
"""

import zlib
from typing import Tuple

import numpy as np


def _key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


class RandomStreams:
    def __init__(self, root_seed: int) -> None:
        if root_seed < 0:
            raise ValueError(f"seed must be non-negative, got {root_seed}")
        self.root_seed = int(root_seed)

    def seed_sequence(self, name: str, *index: int) -> np.random.SeedSequence:
        spawn_key: Tuple[int, ...] = (_key(name), *(int(i) for i in index))
        return np.random.SeedSequence(entropy=self.root_seed, spawn_key=spawn_key)

    def stream(self, name: str, *index: int) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self.seed_sequence(name, *index)))

    def derive_seed(self, name: str, *index: int) -> int:
        return int(self.seed_sequence(name, *index).generate_state(1, np.uint32)[0])

    def __repr__(self) -> str:
        return f"RandomStreams(root_seed={self.root_seed})"
