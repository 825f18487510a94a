"""SplitMix64: the pinned random stream behind every simulated trial.

Chosen for a tiny, fully specified state update so any implementation can
regenerate the same logs. Uniforms use the top 53 output bits.
"""

from __future__ import annotations

import hashlib

from agentreg._pykernels import _INV53, _MASK, splitmix64_next

ALGORITHM = "splitmix64"


def derive_seed(master: int, label: str) -> int:
    """Seed for a named sub-stream: first 8 bytes (big-endian) of sha256("master|label")."""
    digest = hashlib.sha256(f"{master}|{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state, out = splitmix64_next(self.state)
        return out

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * _INV53

    def spawn(self, label: str) -> SplitMix64:
        return SplitMix64(derive_seed(self.state, label))
