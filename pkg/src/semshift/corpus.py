"""Load, tokenize, language-filter and time-slice raw document collections.

The corpus model is immutable after loading: every read operation is safe
under concurrent access.
"""

from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyCorpus, MalformedLine, MissingFile, UnknownLabel

logger = logging.getLogger(__name__)

# Exactly 50 high-frequency English function words; used both by the
# language-detection heuristic and (extended) by the keyword stoplist.
ENGLISH_STOPWORDS = frozenset(
    """a about an and are as at be been but by can do for from had has have he
    her his i if in is it its my no not of on or she so that the their there
    they this to was we were what which who will with""".split()
)
assert len(ENGLISH_STOPWORDS) == 50

DEFAULT_MIN_DOC_TOKENS = 3
ASCII_ALPHA_MIN_FRACTION = 0.8
NUM_TOKEN = "<num>"

# Scanner over raw text. A token is either an already-collapsed digit run,
# a digit run, a word (inner apostrophes/hyphens kept), or a single
# non-space character. Applying it to its own space-joined output yields
# the same tokens, which makes tokenize idempotent.
_TOKEN_RE = re.compile(
    r"<num>"
    r"|\d+"
    r"|[^\W\d_]+(?:['’\-][^\W\d_]+)*"
    r"|[^\s]"
)


@dataclass(frozen=True)
class Document:
    id: str
    time_label: str
    tokens: tuple[str, ...]
    raw_text: str


@dataclass(frozen=True)
class TimeSlice:
    label: str
    documents: tuple[Document, ...]


@dataclass(frozen=True)
class Corpus:
    slices: dict[str, TimeSlice]
    vocab: dict[str, int]
    dropped_non_english: int = 0
    dropped_short: int = 0
    skipped_lines: tuple[int, ...] = field(default_factory=tuple)

    @property
    def documents(self) -> list[Document]:
        return [d for s in self.slices.values() for d in s.documents]


def scan_tokens(text: str) -> list[str]:
    """Split text into surface tokens without changing case."""
    return _TOKEN_RE.findall(text)


def tokenize(text: str) -> list[str]:
    """Lowercased surface tokens with digit runs collapsed to <num>.

    Leading/trailing punctuation is detached into separate tokens while
    intra-word hyphens and apostrophes are preserved. Deterministic and
    idempotent on re-joined output; empty text yields an empty list.
    """
    out = []
    for surface in scan_tokens(text):
        if surface == NUM_TOKEN:
            out.append(NUM_TOKEN)
        elif surface.isdigit():
            out.append(NUM_TOKEN)
        else:
            out.append(surface.lower())
    return out


def detect_english(text: str) -> bool:
    """Heuristic English detector.

    True iff at least 80% of the non-space characters are ASCII letters and
    at least one token is on the 50-word stopword list. Invariant under
    whitespace normalization.
    """
    non_space = [ch for ch in text if not ch.isspace()]
    if not non_space:
        return False
    ascii_alpha = sum(1 for ch in non_space if ("a" <= ch <= "z") or ("A" <= ch <= "Z"))
    if ascii_alpha / len(non_space) < ASCII_ALPHA_MIN_FRACTION:
        return False
    return any(tok in ENGLISH_STOPWORDS for tok in tokenize(text))


def load_corpus(
    path: str | Path,
    format: str = "jsonl",
    min_doc_tokens: int = DEFAULT_MIN_DOC_TOKENS,
    lang_filter: bool = True,
) -> Corpus:
    """Load a JSONL corpus ({"id", "time", "text"} per line) into slices.

    Malformed lines are skipped and reported; non-English documents (when
    lang_filter is on) and documents shorter than min_doc_tokens are
    dropped and counted. Raises EmptyCorpus when nothing survives.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported corpus format: {format!r}")
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))

    docs_by_label: dict[str, list[Document]] = {}
    vocab: Counter[str] = Counter()
    seen_ids: set[str] = set()
    skipped: list[int] = []
    dropped_non_english = 0
    dropped_short = 0

    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                doc_id = record["id"]
                time_label = record["time"]
                text = record["text"]
                if not (isinstance(doc_id, str) and isinstance(time_label, str) and isinstance(text, str)):
                    raise TypeError("id/time/text must be strings")
                if not doc_id:
                    raise ValueError("empty id")
                if doc_id in seen_ids:
                    raise ValueError(f"duplicate id {doc_id!r}")
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                err = MalformedLine(line_no, str(exc))
                logger.warning("skipping %s", err)
                skipped.append(line_no)
                continue

            if lang_filter and not detect_english(text):
                dropped_non_english += 1
                continue
            tokens = tokenize(text)
            if len(tokens) < min_doc_tokens:
                dropped_short += 1
                continue

            seen_ids.add(doc_id)
            doc = Document(id=doc_id, time_label=time_label, tokens=tuple(tokens), raw_text=text)
            docs_by_label.setdefault(time_label, []).append(doc)
            vocab.update(tokens)

    if not docs_by_label:
        raise EmptyCorpus(f"no documents survived loading {path}")

    slices = {
        label: TimeSlice(label=label, documents=tuple(docs))
        for label, docs in docs_by_label.items()
    }
    return Corpus(
        slices=slices,
        vocab=dict(vocab),
        dropped_non_english=dropped_non_english,
        dropped_short=dropped_short,
        skipped_lines=tuple(skipped),
    )


def slice_by_time(corpus: Corpus, labels: list[str]) -> list[TimeSlice]:
    """Return the named slices in the given order."""
    out = []
    for label in labels:
        if label not in corpus.slices:
            raise UnknownLabel(label)
        out.append(corpus.slices[label])
    return out


def slice_vocab(ts: TimeSlice) -> Counter[str]:
    """Token frequency counts within one slice."""
    counts: Counter[str] = Counter()
    for doc in ts.documents:
        counts.update(doc.tokens)
    return counts
