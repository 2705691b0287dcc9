"""Unsupervised keyword scoring per slice and cross-period candidate filtering.

Scores follow the feature-based unigram scheme (case, position, frequency,
relatedness, sentence spread) where lower means more important. A slice is
treated as one concatenated document with sentence boundaries at ".", "!",
"?" and at document ends.
"""

from __future__ import annotations

import logging
import math
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass

from .corpus import ENGLISH_STOPWORDS, NUM_TOKEN, TimeSlice, scan_tokens, slice_vocab
from .errors import NoCandidates

logger = logging.getLogger(__name__)

SENTENCE_ENDINGS = frozenset({".", "!", "?"})

# The 50 shared function words plus pronouns, particles and other
# low-content words excluded from candidacy.
FUNCTION_WORD_STOPLIST = ENGLISH_STOPWORDS | frozenset(
    """after again against all also am any because before between both could
    did does doing down during each few further here hers herself him himself
    how into itself just me might mine more most must myself nor now off once
    only other our ours ourselves out over own same shall should some such
    than then them themselves these those through too under until up upon us
    very when where while why would you your yours yourself
    s t don won isn aren wasn weren hasn haven hadn doesn didn wouldn
    shouldn couldn""".split()
)

DEFAULT_TOP_N = 2000
DEFAULT_MIN_COUNT = 5


@dataclass(frozen=True)
class KeywordScore:
    word: str
    score: float
    tf: int
    slice_label: str


@dataclass(frozen=True)
class CandidateSet:
    words: tuple[str, ...]
    slice_pair: tuple[str, str]
    per_slice_counts: dict[str, tuple[int, int]]


def _is_scorable(token: str) -> bool:
    # Punctuation-only tokens serve as boundaries/neighbors but get no score.
    return token == NUM_TOKEN or any(ch.isalpha() for ch in token)


def _split_sentences(stream_docs: list[tuple[str, ...]]) -> list[list[str]]:
    """Sentences over the concatenated slice; a sentence never spans documents."""
    sentences: list[list[str]] = []
    for tokens in stream_docs:
        current: list[str] = []
        for tok in tokens:
            current.append(tok)
            if tok in SENTENCE_ENDINGS:
                sentences.append(current)
                current = []
        if current:
            sentences.append(current)
    return sentences


def yake_scores(slice: TimeSlice) -> dict[str, KeywordScore]:
    """Score every distinct non-stoplist unigram of the slice; lower is better."""
    if not slice.documents:
        raise ValueError("slice is empty")

    doc_streams = [doc.tokens for doc in slice.documents]
    tf: Counter[str] = Counter()
    for tokens in doc_streams:
        tf.update(t for t in tokens if _is_scorable(t))
    if not tf:
        return {}

    # Casing counts from the raw surface forms; frequencies stay on the
    # lowercased token stream.
    title_count: Counter[str] = Counter()
    upper_count: Counter[str] = Counter()
    for doc in slice.documents:
        for surface in scan_tokens(doc.raw_text):
            low = surface.lower()
            if low not in tf:
                continue
            if len(surface) > 1 and surface.isupper():
                upper_count[low] += 1
            elif surface[:1].isupper():
                title_count[low] += 1

    sentences = _split_sentences(doc_streams)
    n_sentences = len(sentences)
    sent_indexes: dict[str, list[int]] = defaultdict(list)
    sent_presence: Counter[str] = Counter()
    for idx, sent in enumerate(sentences, start=1):
        seen = set()
        for tok in sent:
            if tok in tf:
                sent_indexes[tok].append(idx)
                seen.add(tok)
        sent_presence.update(seen)

    left_neighbors: dict[str, set[str]] = defaultdict(set)
    right_neighbors: dict[str, set[str]] = defaultdict(set)
    left_slots: Counter[str] = Counter()
    right_slots: Counter[str] = Counter()
    for tokens in doc_streams:
        for i, tok in enumerate(tokens):
            if tok not in tf:
                continue
            if i > 0:
                left_neighbors[tok].add(tokens[i - 1])
                left_slots[tok] += 1
            if i < len(tokens) - 1:
                right_neighbors[tok].add(tokens[i + 1])
                right_slots[tok] += 1

    tf_values = list(tf.values())
    tf_mean = statistics.fmean(tf_values)
    tf_std = statistics.pstdev(tf_values)
    max_tf = max(tf_values)

    scores: dict[str, KeywordScore] = {}
    for word, freq in tf.items():
        if word in FUNCTION_WORD_STOPLIST:
            continue
        t_case = max(title_count[word], upper_count[word]) / (1.0 + math.log(freq))
        median_sent = statistics.median(sent_indexes[word])
        t_pos = math.log2(math.log2(2.0 + median_sent))
        t_fnorm = freq / (tf_mean + tf_std)
        dl = len(left_neighbors[word]) / left_slots[word] if left_slots[word] else 0.0
        dr = len(right_neighbors[word]) / right_slots[word] if right_slots[word] else 0.0
        t_rel = 1.0 + (dl + dr) * freq / max_tf
        t_sent = sent_presence[word] / n_sentences
        score = (t_rel * t_pos) / (t_case + t_fnorm / t_rel + t_sent / t_rel)
        scores[word] = KeywordScore(word=word, score=score, tf=freq, slice_label=slice.label)
    return scores


def extract_candidates(
    slice_t: TimeSlice,
    slice_tp: TimeSlice,
    top_n: int = DEFAULT_TOP_N,
    min_count: int = DEFAULT_MIN_COUNT,
    stoplist: frozenset[str] | set[str] = FUNCTION_WORD_STOPLIST,
) -> CandidateSet:
    """Cross-period candidate words ranked by importance on slice_t.

    Keeps words present in both slices with count >= min_count in each,
    drops stoplist words and the <num> token, ranks by score ascending with
    lexicographic tie-break, and truncates to top_n.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    if min_count < 1:
        raise ValueError("min_count must be >= 1")

    counts_t = slice_vocab(slice_t)
    counts_tp = slice_vocab(slice_tp)
    scores = yake_scores(slice_t)

    eligible = [
        w
        for w in counts_t
        if w in counts_tp
        and counts_t[w] >= min_count
        and counts_tp[w] >= min_count
        and w not in stoplist
        and w != NUM_TOKEN
        and w in scores
    ]
    if not eligible:
        raise NoCandidates(
            f"no shared candidates between {slice_t.label!r} and {slice_tp.label!r}"
        )

    eligible.sort(key=lambda w: (scores[w].score, w))
    selected = eligible[:top_n]
    return CandidateSet(
        words=tuple(selected),
        slice_pair=(slice_t.label, slice_tp.label),
        per_slice_counts={w: (counts_t[w], counts_tp[w]) for w in selected},
    )
