"""Batch extraction of per-occurrence hidden states from a pre-trained MLM.

Each occurrence window is encoded as [CLS] pieces... [SEP]; the vector for
the occurrence is the hidden state at the configured layer, mean-pooled
over the word pieces of the center token. Records are written in the
semshift embedding interchange format (float32, 7 significant digits).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .textprep import Occurrence, iter_occurrences, read_candidate_words, read_corpus

logger = logging.getLogger(__name__)

INTERCHANGE_FORMAT = "semshift-emb"
INTERCHANGE_VERSION = 1


class ModelLoadError(Exception):
    pass


@dataclass
class ExportConfig:
    model_id: str
    layer: int = -1  # -1 = last hidden layer; 0 = embedding output; i = after layer i
    window_size: int = 128
    batch_size: int = 16
    device: str = "cpu"
    min_doc_tokens: int = 3
    lang_filter: bool = True


def _load_model(config: ExportConfig):
    from transformers import AutoModel, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(config.model_id)
        model = AutoModel.from_pretrained(config.model_id)
    except Exception as exc:
        raise ModelLoadError(f"cannot load model {config.model_id!r}: {exc}") from exc
    model.eval()
    model.to(config.device)
    n_layers = model.config.num_hidden_layers
    if not (config.layer == -1 or 0 <= config.layer <= n_layers):
        raise ValueError(f"layer {config.layer} outside model depth {n_layers}")
    if config.window_size > model.config.max_position_embeddings:
        raise ValueError(
            f"window_size {config.window_size} exceeds model max sequence length "
            f"{model.config.max_position_embeddings}"
        )
    return tokenizer, model


def _assemble(tokenizer, occ: Occurrence, max_len: int):
    """Piece ids for one window plus the piece span of the center token.

    Returns None when the center token cannot be encoded. Windows whose
    pieces exceed the model maximum are trimmed from the edge farthest
    from the center.
    """
    window = list(occ.window)
    center = occ.center
    pieces = [tokenizer.tokenize(tok) for tok in window]
    if not pieces[center]:
        return None
    unk = tokenizer.unk_token
    pieces = [p if p else [unk] for p in pieces]

    def total():
        return sum(len(p) for p in pieces) + 2

    while total() > max_len and len(pieces) > 1:
        if center >= len(pieces) - center:  # left edge is farther
            pieces.pop(0)
            center -= 1
        else:
            pieces.pop()
        if center < 0 or center >= len(pieces):
            return None

    start = 1 + sum(len(p) for p in pieces[:center])  # +1 for [CLS]
    span = (start, start + len(pieces[center]))
    ids = [tokenizer.cls_token_id]
    for p in pieces:
        ids.extend(tokenizer.convert_tokens_to_ids(p))
    ids.append(tokenizer.sep_token_id)
    return ids, span


def _run_batch(model, batch_ids, pad_id, layer, device):
    width = max(len(ids) for ids in batch_ids)
    input_ids = torch.full((len(batch_ids), width), pad_id, dtype=torch.long)
    attention = torch.zeros((len(batch_ids), width), dtype=torch.long)
    for i, ids in enumerate(batch_ids):
        input_ids[i, : len(ids)] = torch.tensor(ids, dtype=torch.long)
        attention[i, : len(ids)] = 1
    with torch.no_grad():
        out = model(
            input_ids=input_ids.to(device),
            attention_mask=attention.to(device),
            output_hidden_states=True,
        )
    hidden = out.hidden_states[layer]
    return hidden.cpu().numpy()


def _encode_all(tokenizer, model, encodable, config: ExportConfig):
    """Yield one vector per (occurrence, ids, span), batch at a time."""
    pad_id = tokenizer.pad_token_id
    batch_size = config.batch_size
    i = 0
    while i < len(encodable):
        batch = encodable[i : i + batch_size]
        ids_batch = [ids for (_, ids, _) in batch]
        try:
            hidden = _run_batch(model, ids_batch, pad_id, config.layer, config.device)
        except (RuntimeError, torch.cuda.OutOfMemoryError) as exc:
            if "out of memory" not in str(exc).lower():
                raise
            # one retry at half the batch size
            logger.warning("OOM at batch_size=%d; retrying once at %d", batch_size, max(1, batch_size // 2))
            batch_size = max(1, batch_size // 2)
            batch = encodable[i : i + batch_size]
            ids_batch = [ids for (_, ids, _) in batch]
            hidden = _run_batch(model, ids_batch, pad_id, config.layer, config.device)
        for row, (occ, _, span) in enumerate(batch):
            vec = hidden[row, span[0] : span[1]].mean(axis=0)
            yield occ, vec
        i += len(batch)


def export_embeddings(
    corpus_path: str | Path,
    candidates_path: str | Path,
    config: ExportConfig,
    out_path: str | Path,
) -> dict:
    """Write the interchange file; returns a per-word count summary."""
    tokenizer, model = _load_model(config)
    docs = read_corpus(
        corpus_path, min_doc_tokens=config.min_doc_tokens, lang_filter=config.lang_filter
    )
    words = read_candidate_words(candidates_path)
    max_len = model.config.max_position_embeddings
    dim = model.config.hidden_size

    counts = {w: 0 for w in words}
    skipped = 0
    out_path = Path(out_path)
    with out_path.open("w", encoding="utf-8") as fh:
        header = {"format": INTERCHANGE_FORMAT, "version": INTERCHANGE_VERSION, "dim": dim}
        fh.write(json.dumps(header) + "\n")
        for word in words:
            occurrences = iter_occurrences(docs, word, config.window_size)
            encodable = []
            for occ in occurrences:
                assembled = _assemble(tokenizer, occ, max_len)
                if assembled is None:
                    skipped += 1
                    continue
                encodable.append((occ, assembled[0], assembled[1]))
            for occ, vec in _encode_all(tokenizer, model, encodable, config):
                record = {
                    "word": occ.word,
                    "time": occ.time,
                    "doc_id": occ.doc_id,
                    "position": occ.position,
                    "vector": [float(f"{float(np.float32(v)):.7g}") for v in vec],
                }
                fh.write(json.dumps(record) + "\n")
                counts[word] += 1

    summary = {
        "words": counts,
        "absent_words": sorted(w for w, c in counts.items() if c == 0),
        "skipped_unencodable": skipped,
        "total_records": sum(counts.values()),
        "dim": dim,
        "layer": config.layer,
        "subword_aggregation": "mean",
    }
    return summary
