"""Compile per-document masking plans and emit masked-corpus files.

Four strategies: random, frequency (corpus-frequent tokens first),
importance (best keyword scores first), and lmlm (salient semantic-change
candidates first, remainder random). Planning is per-document pure: the
RNG seed is derived from (seed, doc_id), so document order never affects
output.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .change import MaskCandidateList
from .corpus import Document
from .errors import EmptyDocument, MalformedRecord, UnknownDocId
from .seeding import doc_rng

STRATEGIES = ("random", "frequency", "importance", "lmlm")
CORRUPTIONS = ("all_mask", "bert_80_10_10")
DEFAULT_ALPHA = 0.15
# The hyper-parameter sweep favors a higher ratio; kept as guidance.
RECOMMENDED_ALPHA = 0.30
DEFAULT_MASK_TOKEN = "[MASK]"
MASKED_FORMAT = "semshift-masked"
MASKED_VERSION = 1


@dataclass(frozen=True)
class MaskingPlan:
    doc_id: str
    positions: tuple[int, ...]  # strictly increasing
    labels: tuple[str, ...]  # original tokens at positions
    strategy: str
    alpha: float


@dataclass(frozen=True)
class MaskedCorpus:
    plans: tuple[MaskingPlan, ...]
    mask_token: str = DEFAULT_MASK_TOKEN
    corruption: str = "all_mask"


def mask_budget(alpha: float, length: int) -> int:
    """Number of positions to mask: round-half-up of alpha * length,
    at least 1 and at most the document length."""
    return min(length, max(1, math.floor(alpha * length + 0.5)))


def _check_doc(doc: Document, alpha: float) -> int:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if not doc.tokens:
        raise EmptyDocument(doc.id)
    return mask_budget(alpha, len(doc.tokens))


def _finalize(doc: Document, positions: list[int], strategy: str, alpha: float) -> MaskingPlan:
    positions = sorted(positions)
    return MaskingPlan(
        doc_id=doc.id,
        positions=tuple(positions),
        labels=tuple(doc.tokens[p] for p in positions),
        strategy=strategy,
        alpha=alpha,
    )


def plan_random(doc: Document, alpha: float = DEFAULT_ALPHA, seed: int = 0) -> MaskingPlan:
    """Uniform sample of positions without replacement."""
    budget = _check_doc(doc, alpha)
    rng = doc_rng(seed, doc.id)
    positions = rng.sample(range(len(doc.tokens)), budget)
    return _finalize(doc, positions, "random", alpha)


def plan_frequency(
    doc: Document, corpus_vocab: Mapping[str, int], alpha: float = DEFAULT_ALPHA, seed: int = 0
) -> MaskingPlan:
    """Positions of corpus-frequent tokens first; ties by earlier position."""
    budget = _check_doc(doc, alpha)
    order = sorted(
        range(len(doc.tokens)),
        key=lambda p: (-corpus_vocab.get(doc.tokens[p], 0), p),
    )
    return _finalize(doc, order[:budget], "frequency", alpha)


def plan_importance(
    doc: Document, yake_scores: Mapping[str, float], alpha: float = DEFAULT_ALPHA, seed: int = 0
) -> MaskingPlan:
    """Positions of the most important (lowest-scoring) tokens first.

    Tokens missing from the score table rank last; ties by earlier position.
    """
    budget = _check_doc(doc, alpha)
    order = sorted(
        range(len(doc.tokens)),
        key=lambda p: (yake_scores.get(doc.tokens[p], math.inf), p),
    )
    return _finalize(doc, order[:budget], "importance", alpha)


def plan_lmlm(
    doc: Document, w_mask: MaskCandidateList, alpha: float = DEFAULT_ALPHA, seed: int = 0
) -> MaskingPlan:
    """Mask semantic-change candidates first, then fill randomly.

    Phase 1 takes every position whose token is in w_mask, ordered by the
    token's rank in the candidate list (highest change score first, ties by
    position), truncated to the budget. Phase 2 fills the rest by seeded
    uniform sampling over non-candidate positions; with no candidates the
    plan coincides with plan_random for the same seed.
    """
    budget = _check_doc(doc, alpha)
    rank = {w: i for i, w in enumerate(w_mask.words)}
    candidate_positions = [p for p, tok in enumerate(doc.tokens) if tok in rank]
    candidate_positions.sort(key=lambda p: (rank[doc.tokens[p]], p))
    chosen = candidate_positions[:budget]

    remaining = budget - len(chosen)
    if remaining > 0:
        other = [p for p in range(len(doc.tokens)) if doc.tokens[p] not in rank]
        rng = doc_rng(seed, doc.id)
        chosen = chosen + rng.sample(other, remaining)
    return _finalize(doc, chosen, "lmlm", alpha)


def emit_masked_corpus(
    plans: list[MaskingPlan],
    docs: Mapping[str, Document],
    mask_token: str = DEFAULT_MASK_TOKEN,
    corruption: str = "all_mask",
    seed: int = 0,
    out_path: str | Path = "masked.jsonl",
) -> Path:
    """Write the masked corpus as JSONL (header line first).

    Under all_mask every planned position becomes mask_token; under
    bert_80_10_10 each position is masked with probability 0.8, replaced by
    a random vocabulary token with 0.1, or kept with 0.1 (seeded per
    document). Labels always hold the original tokens.
    """
    if corruption not in CORRUPTIONS:
        raise ValueError(f"unknown corruption {corruption!r}")
    out_path = Path(out_path)

    vocab = sorted({tok for d in docs.values() for tok in d.tokens}) if corruption == "bert_80_10_10" else []

    with out_path.open("w", encoding="utf-8") as fh:
        header = {
            "format": MASKED_FORMAT,
            "version": MASKED_VERSION,
            "mask_token": mask_token,
            "corruption": corruption,
        }
        if plans:
            header["strategy"] = plans[0].strategy
            header["alpha"] = plans[0].alpha
        fh.write(json.dumps(header) + "\n")

        for plan in plans:
            if plan.doc_id not in docs:
                raise UnknownDocId(plan.doc_id)
            doc = docs[plan.doc_id]
            tokens = list(doc.tokens)
            if corruption == "all_mask":
                for p in plan.positions:
                    tokens[p] = mask_token
            else:
                rng = doc_rng(seed, doc.id)
                for p in plan.positions:
                    roll = rng.random()
                    if roll < 0.8:
                        tokens[p] = mask_token
                    elif roll < 0.9:
                        tokens[p] = vocab[rng.randrange(len(vocab))]
                    # else: keep the original token
            record = {
                "doc_id": plan.doc_id,
                "tokens": tokens,
                "mask_positions": list(plan.positions),
                "labels": list(plan.labels),
            }
            fh.write(json.dumps(record) + "\n")
    return out_path


def read_masked_corpus(path: str | Path) -> MaskedCorpus:
    """Parse a masked-corpus file back into plans (labels and positions)."""
    path = Path(path)
    plans: list[MaskingPlan] = []
    header: dict | None = None
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(line_no, str(exc)) from exc
            if header is None:
                if record.get("format") != MASKED_FORMAT:
                    raise MalformedRecord(line_no, "missing or invalid header")
                header = record
                continue
            try:
                plans.append(
                    MaskingPlan(
                        doc_id=record["doc_id"],
                        positions=tuple(record["mask_positions"]),
                        labels=tuple(record["labels"]),
                        strategy=header.get("strategy", "random"),
                        alpha=float(header.get("alpha", DEFAULT_ALPHA)),
                    )
                )
            except (KeyError, TypeError) as exc:
                raise MalformedRecord(line_no, str(exc)) from exc
    if header is None:
        raise MalformedRecord(0, "empty masked-corpus file")
    return MaskedCorpus(
        plans=tuple(plans),
        mask_token=header.get("mask_token", DEFAULT_MASK_TOKEN),
        corruption=header.get("corruption", "all_mask"),
    )
