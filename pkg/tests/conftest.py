"""Shared fixtures: synthetic corpora with controlled context structure.

The generators build documents of the shape
    the c1 c2 c3 WORD c4 c5 c6 .
where the context tokens rotate round-robin through a per-word pool. Using
the same pool (and rotation) in both slices gives a word identical context
samples across time; giving each slice its own pool plants a sense shift.
Round-robin keeps every context token under the candidate min-count so only
the target words become candidates.
"""

from __future__ import annotations

import itertools
import json
import string
from pathlib import Path

import pytest

from semshift.corpus import Document, TimeSlice


def make_doc(doc_id: str, tokens, time_label: str = "t", raw_text: str | None = None) -> Document:
    tokens = tuple(tokens)
    return Document(
        id=doc_id,
        time_label=time_label,
        tokens=tokens,
        raw_text=raw_text if raw_text is not None else " ".join(tokens),
    )


def make_slice(label: str, docs) -> TimeSlice:
    return TimeSlice(label=label, documents=tuple(docs))


def alpha_names(prefix: str, n: int) -> list[str]:
    """n distinct lowercase alphabetic tokens sharing a prefix."""
    out = []
    for combo in itertools.product(string.ascii_lowercase, repeat=3):
        out.append(prefix + "".join(combo))
        if len(out) == n:
            return out
    raise ValueError("prefix space exhausted")


def write_corpus_jsonl(path: Path, records) -> Path:
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path


class SynthCorpus:
    def __init__(self, path: Path, planted: str, controls: list[str]):
        self.path = path
        self.planted = planted
        self.controls = controls


def build_shift_corpus(
    path: Path,
    n_controls: int = 19,
    occurrences: int = 30,
    ctx_per_doc: int = 6,
    control_pool: int = 48,
    sense_pool: int = 8,
    label_t: str = "t",
    label_tp: str = "tp",
) -> SynthCorpus:
    """One planted sense-shift word plus stable control words."""
    planted = "pivotword"
    controls = alpha_names("stable", n_controls)
    records = []
    counter = itertools.count()

    def emit(word: str, pool: list[str], label: str) -> None:
        for j in range(occurrences):
            ctx = [pool[(ctx_per_doc * j + i) % len(pool)] for i in range(ctx_per_doc)]
            tokens = ["the", *ctx[:3], word, *ctx[3:], "."]
            records.append(
                {"id": f"d{next(counter)}", "time": label, "text": " ".join(tokens)}
            )

    for word in controls:
        pool = alpha_names("c" + word[-3:] + "q", control_pool)
        emit(word, pool, label_t)
        emit(word, pool, label_tp)
    emit(planted, alpha_names("senseaq", sense_pool), label_t)
    emit(planted, alpha_names("sensebq", sense_pool), label_tp)

    write_corpus_jsonl(path, records)
    return SynthCorpus(path, planted, controls)


def build_table_corpus(
    path: Path,
    n_stable: int = 900,
    n_shifted: int = 100,
    occurrences: int = 6,
    ctx_per_doc: int = 6,
    pool_size: int = 9,
) -> tuple[list[str], list[str]]:
    """Mostly-stable candidate population with a shifted minority."""
    stable = alpha_names("st", n_stable)
    shifted = alpha_names("sh", n_shifted)
    records = []
    counter = itertools.count()

    def emit(word: str, pool: list[str], label: str) -> None:
        for j in range(occurrences):
            ctx = [pool[(ctx_per_doc * j + i) % len(pool)] for i in range(ctx_per_doc)]
            tokens = ["the", *ctx[:3], word, *ctx[3:], "."]
            records.append(
                {"id": f"d{next(counter)}", "time": label, "text": " ".join(tokens)}
            )

    for i, word in enumerate(stable):
        pool = alpha_names(f"p{word}", pool_size)
        emit(word, pool, "t")
        emit(word, pool, "tp")
    for word in shifted:
        emit(word, alpha_names(f"a{word}", pool_size), "t")
        emit(word, alpha_names(f"b{word}", pool_size), "tp")

    write_corpus_jsonl(path, records)
    return stable, shifted


@pytest.fixture(scope="session")
def shift_corpus(tmp_path_factory) -> SynthCorpus:
    path = tmp_path_factory.mktemp("shift") / "corpus.jsonl"
    return build_shift_corpus(path)


@pytest.fixture(scope="session")
def small_shift_corpus(tmp_path_factory) -> SynthCorpus:
    path = tmp_path_factory.mktemp("small_shift") / "corpus.jsonl"
    return build_shift_corpus(path, n_controls=7, occurrences=10, control_pool=16)
