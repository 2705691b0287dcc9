"""Corpus reading per the semshift JSONL contract.

The exporter talks to the pipeline only through files, so the corpus
loading semantics (tokenization, language filter, short-document drop,
occurrence windows) are implemented here to the documented contract:
lowercase; detach edge punctuation; keep intra-word hyphens/apostrophes;
collapse digit runs to <num>; drop non-English documents (ASCII-letter
ratio >= 0.8 plus a function-word hit) and documents under 3 tokens;
windows take floor((size-1)/2) tokens of left context, remainder right.
The conformance tests pin these rules against the pipeline's own loader.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

logger = logging.getLogger(__name__)

NUM_TOKEN = "<num>"
MIN_DOC_TOKENS = 3
ASCII_ALPHA_MIN_FRACTION = 0.8

ENGLISH_STOPWORDS = frozenset(
    """a about an and are as at be been but by can do for from had has have he
    her his i if in is it its my no not of on or she so that the their there
    they this to was we were what which who will with""".split()
)

_TOKEN_RE = re.compile(
    r"<num>"
    r"|\d+"
    r"|[^\W\d_]+(?:['’\-][^\W\d_]+)*"
    r"|[^\s]"
)


@dataclass(frozen=True)
class Doc:
    id: str
    time: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class Occurrence:
    word: str
    doc_id: str
    time: str
    position: int
    window: tuple[str, ...]
    center: int


def tokenize(text: str) -> list[str]:
    out = []
    for surface in _TOKEN_RE.findall(text):
        if surface == NUM_TOKEN:
            out.append(NUM_TOKEN)
        elif surface.isdigit():
            out.append(NUM_TOKEN)
        else:
            out.append(surface.lower())
    return out


def looks_english(text: str) -> bool:
    non_space = [ch for ch in text if not ch.isspace()]
    if not non_space:
        return False
    ascii_alpha = sum(1 for ch in non_space if ("a" <= ch <= "z") or ("A" <= ch <= "Z"))
    if ascii_alpha / len(non_space) < ASCII_ALPHA_MIN_FRACTION:
        return False
    return any(tok in ENGLISH_STOPWORDS for tok in tokenize(text))


def read_corpus(path: str | Path, min_doc_tokens: int = MIN_DOC_TOKENS, lang_filter: bool = True) -> list[Doc]:
    docs: list[Doc] = []
    seen: set[str] = set()
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                doc_id, time, text = rec["id"], rec["time"], rec["text"]
                if not (isinstance(doc_id, str) and isinstance(time, str) and isinstance(text, str)):
                    raise TypeError("id/time/text must be strings")
                if not doc_id or doc_id in seen:
                    raise ValueError(f"bad or duplicate id {doc_id!r}")
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                logger.warning("skipping line %d: %s", line_no, exc)
                continue
            if lang_filter and not looks_english(text):
                continue
            tokens = tokenize(text)
            if len(tokens) < min_doc_tokens:
                continue
            seen.add(doc_id)
            docs.append(Doc(id=doc_id, time=time, tokens=tuple(tokens)))
    return docs


def read_candidate_words(path: str | Path) -> list[str]:
    """First column of a candidates/ranked TSV, file order preserved."""
    words: list[str] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            words.append(line.split("\t")[0])
    return words


def iter_occurrences(docs: list[Doc], word: str, window_size: int) -> list[Occurrence]:
    left = (window_size - 1) // 2
    right = window_size - 1 - left
    out: list[Occurrence] = []
    for doc in docs:
        for pos, tok in enumerate(doc.tokens):
            if tok != word:
                continue
            start = max(0, pos - left)
            stop = min(len(doc.tokens), pos + right + 1)
            out.append(
                Occurrence(
                    word=word,
                    doc_id=doc.id,
                    time=doc.time,
                    position=pos,
                    window=doc.tokens[start:stop],
                    center=pos - start,
                )
            )
    return out
