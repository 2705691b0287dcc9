"""Perplexity over masked positions, temporal test splitting, and
MASK/PAD/REP perturbation for error analysis.

Log-probabilities come from an external trainer as natural logs; perplexity
is exp of the mean negative log-likelihood over planned positions.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping

from .change import MaskCandidateList
from .corpus import Document
from .errors import EmptyReplacementVocab, MalformedRecord, MissingLogProb
from .masking import MaskingPlan
from .seeding import doc_rng

logger = logging.getLogger(__name__)

MASK_PLACEHOLDER = "<MASK>"
PAD_PLACEHOLDER = "<PAD>"
PERTURB_MODES = ("MASK", "PAD", "REP")
DEFAULT_TRIGGER_TOP_N = 100


@dataclass(frozen=True)
class TokenLogProbFile:
    records: dict[tuple[str, int], float]


@dataclass(frozen=True)
class EvalSplit:
    with_temporal: tuple[str, ...]
    without_temporal: tuple[str, ...]
    trigger_tokens: tuple[str, ...]


def read_logprob_file(path: str | Path) -> TokenLogProbFile:
    """Parse {"doc_id", "position", "logprob"} JSONL records.

    Enforces logprob <= 0 and (doc_id, position) uniqueness.
    """
    path = Path(path)
    records: dict[tuple[str, int], float] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                key = (rec["doc_id"], rec["position"])
                logprob = float(rec["logprob"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise MalformedRecord(line_no, str(exc)) from exc
            if logprob > 0:
                raise MalformedRecord(line_no, f"positive logprob {logprob}")
            if key in records:
                raise MalformedRecord(line_no, f"duplicate record for {key}")
            records[key] = logprob
    return TokenLogProbFile(records=records)


def perplexity(logprobs: TokenLogProbFile, plans: Iterable[MaskingPlan]) -> float:
    """exp(-mean logprob) over every planned masked position."""
    total = 0.0
    count = 0
    for plan in plans:
        for pos in plan.positions:
            key = (plan.doc_id, pos)
            if key not in logprobs.records:
                raise MissingLogProb(plan.doc_id, pos)
            total += logprobs.records[key]
            count += 1
    if count == 0:
        raise ValueError("no planned positions to score")
    return math.exp(-total / count)


def split_by_temporal_tokens(
    docs: Iterable[Document], ranked: MaskCandidateList, top_n: int = DEFAULT_TRIGGER_TOP_N
) -> EvalSplit:
    """Partition documents by whether they contain a top-ranked trigger token."""
    if len(ranked.words) < top_n:
        logger.warning(
            "only %d ranked words available for %d triggers; using all",
            len(ranked.words),
            top_n,
        )
    triggers = ranked.words[:top_n]
    trigger_set = set(triggers)
    with_temporal: list[str] = []
    without_temporal: list[str] = []
    for doc in docs:
        if any(tok in trigger_set for tok in doc.tokens):
            with_temporal.append(doc.id)
        else:
            without_temporal.append(doc.id)
    return EvalSplit(
        with_temporal=tuple(with_temporal),
        without_temporal=tuple(without_temporal),
        trigger_tokens=tuple(triggers),
    )


def perturb(
    doc: Document,
    triggers: Iterable[str],
    mode: str,
    vocab: Mapping[str, int] | Iterable[str] = (),
    seed: int = 0,
) -> Document:
    """Replace every trigger-token position according to the mode.

    MASK and PAD insert their placeholder literals; REP draws a seeded
    uniform replacement from the vocabulary minus the triggers. Document
    length and id are preserved.
    """
    if mode not in PERTURB_MODES:
        raise ValueError(f"unknown perturbation mode {mode!r}")
    trigger_set = set(triggers)
    if mode == "REP":
        eligible = sorted(set(vocab) - trigger_set)
        if not eligible:
            raise EmptyReplacementVocab("vocabulary is empty after removing triggers")
        rng = doc_rng(seed, doc.id)

    tokens = list(doc.tokens)
    for i, tok in enumerate(tokens):
        if tok not in trigger_set:
            continue
        if mode == "MASK":
            tokens[i] = MASK_PLACEHOLDER
        elif mode == "PAD":
            tokens[i] = PAD_PLACEHOLDER
        else:
            tokens[i] = eligible[rng.randrange(len(eligible))]
    return replace(doc, tokens=tuple(tokens))
