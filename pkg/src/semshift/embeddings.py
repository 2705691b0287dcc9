"""Occurrence windows, usage matrices, and the embedding interchange format.

Contextual vectors for candidate-word occurrences arrive through a JSONL
interchange file (one occurrence per line, header first); a deterministic
signed-hash bag-of-context embedder makes the downstream pipeline testable
without any neural model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import TimeSlice
from .errors import DimMismatch, MalformedRecord, WordAbsent, ZeroVector
from .seeding import stable_int

INTERCHANGE_FORMAT = "semshift-emb"
INTERCHANGE_VERSION = 1
DEFAULT_WINDOW_SIZE = 128


@dataclass(frozen=True)
class UsageOccurrence:
    word: str
    doc_id: str
    position: int
    window: tuple[str, ...]
    time_label: str
    center: int  # index of the occurrence inside window

    def __post_init__(self):
        assert 0 <= self.center < len(self.window)
        assert self.window[self.center] == self.word


@dataclass
class UsageMatrix:
    word: str
    time_label: str
    rows: np.ndarray  # (N, dim)
    occurrence_refs: list[tuple[str, int]]

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])


def collect_occurrences(
    slice: TimeSlice, word: str, window_size: int = DEFAULT_WINDOW_SIZE
) -> list[UsageOccurrence]:
    """One windowed occurrence per token position equal to word.

    The window takes floor((window_size-1)/2) tokens of left context and the
    remainder on the right, clipped at document boundaries.
    """
    if window_size < 3:
        raise ValueError("window_size must be >= 3")
    left = (window_size - 1) // 2
    right = window_size - 1 - left

    occurrences: list[UsageOccurrence] = []
    for doc in slice.documents:
        for pos, tok in enumerate(doc.tokens):
            if tok != word:
                continue
            start = max(0, pos - left)
            stop = min(len(doc.tokens), pos + right + 1)
            occurrences.append(
                UsageOccurrence(
                    word=word,
                    doc_id=doc.id,
                    position=pos,
                    window=doc.tokens[start:stop],
                    time_label=slice.label,
                    center=pos - start,
                )
            )
    if not occurrences:
        raise WordAbsent(word)
    return occurrences


def read_embedding_file(path: str | Path) -> dict[tuple[str, str], UsageMatrix]:
    """Parse the interchange file into per-(word, time) usage matrices.

    The first line must be the header {"format": "semshift-emb", "version",
    "dim"}; every record vector must match the header dimension. An empty
    file yields an empty map.
    """
    path = Path(path)
    grouped: dict[tuple[str, str], tuple[list[list[float]], list[tuple[str, int]]]] = {}
    dim: int | None = None

    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(line_no, str(exc)) from exc
            if dim is None:
                if (
                    not isinstance(record, dict)
                    or record.get("format") != INTERCHANGE_FORMAT
                    or not isinstance(record.get("dim"), int)
                ):
                    raise MalformedRecord(line_no, "missing or invalid header")
                dim = record["dim"]
                continue
            try:
                word = record["word"]
                time_label = record["time"]
                doc_id = record["doc_id"]
                position = record["position"]
                vector = record["vector"]
                if not (
                    isinstance(word, str)
                    and isinstance(time_label, str)
                    and isinstance(doc_id, str)
                    and isinstance(position, int)
                    and isinstance(vector, list)
                ):
                    raise TypeError("bad field types")
            except (KeyError, TypeError) as exc:
                raise MalformedRecord(line_no, str(exc)) from exc
            if len(vector) != dim:
                raise DimMismatch(f"word {word!r}: vector of dim {len(vector)}, expected {dim}")
            rows, refs = grouped.setdefault((word, time_label), ([], []))
            rows.append([float(v) for v in vector])
            refs.append((doc_id, position))

    return {
        (word, time_label): UsageMatrix(
            word=word,
            time_label=time_label,
            rows=np.asarray(rows, dtype=np.float64),
            occurrence_refs=refs,
        )
        for (word, time_label), (rows, refs) in grouped.items()
    }


def write_embedding_file(
    matrices: dict[tuple[str, str], UsageMatrix], path: str | Path, dim: int | None = None
) -> None:
    """Serialize usage matrices back to the interchange format.

    Values are stored as float32 rounded to 7 significant digits; records
    are emitted in sorted (word, time) order. An empty map with no explicit
    dim writes an empty file, mirroring the reader.
    """
    path = Path(path)
    if dim is None:
        dims = {m.dim for m in matrices.values()}
        if len(dims) > 1:
            raise DimMismatch(f"inconsistent dims across matrices: {sorted(dims)}")
        dim = dims.pop() if dims else None
    if dim is None:
        path.write_text("", encoding="utf-8")
        return

    with path.open("w", encoding="utf-8") as fh:
        header = {"format": INTERCHANGE_FORMAT, "version": INTERCHANGE_VERSION, "dim": dim}
        fh.write(json.dumps(header) + "\n")
        for key in sorted(matrices):
            m = matrices[key]
            if m.dim != dim:
                raise DimMismatch(f"word {m.word!r}: matrix dim {m.dim}, expected {dim}")
            for row, (doc_id, position) in zip(m.rows, m.occurrence_refs):
                record = {
                    "word": m.word,
                    "time": m.time_label,
                    "doc_id": doc_id,
                    "position": position,
                    "vector": [float(f"{float(np.float32(v)):.7g}") for v in row],
                }
                fh.write(json.dumps(record) + "\n")


def normalize_matrix(m: UsageMatrix) -> UsageMatrix:
    """Scale every row to unit L2 norm, preserving order. Idempotent."""
    norms = np.linalg.norm(m.rows, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroVector(int(zero[0]))
    return UsageMatrix(
        word=m.word,
        time_label=m.time_label,
        rows=m.rows / norms[:, None],
        occurrence_refs=list(m.occurrence_refs),
    )


def fallback_embed(occ: UsageOccurrence, dim: int, seed: int) -> np.ndarray:
    """Deterministic signed-hash bag-of-context embedding.

    Each context token (window minus the center position) hashes with the
    seed to a bucket and a sign; the vector is the sum of the signed
    one-hot buckets. Identical windows give identical vectors regardless of
    doc_id or position.
    """
    if dim < 8:
        raise ValueError("dim must be >= 8")
    vec = np.zeros(dim, dtype=np.float64)
    for i, tok in enumerate(occ.window):
        if i == occ.center:
            continue
        h = stable_int(seed, tok)
        bucket = h % dim
        sign = 1.0 if (h >> 32) & 1 == 0 else -1.0
        vec[bucket] += sign
    return vec
