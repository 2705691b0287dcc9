"""Stable, process-independent seed derivation.

Python's builtin hash() is salted per process, so every seeded draw in the
pipeline goes through blake2b instead. Deriving a per-document seed from
(seed, doc_id) keeps plans independent of document iteration order.
"""

from __future__ import annotations

import hashlib
import random


def stable_int(*parts: object) -> int:
    """Collapse the parts into a deterministic 64-bit integer."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x00")
    return int.from_bytes(h.digest(), "big")


def doc_rng(seed: int, doc_id: str) -> random.Random:
    """Per-document RNG derived from the run seed and the document id."""
    return random.Random(stable_int(seed, doc_id))
