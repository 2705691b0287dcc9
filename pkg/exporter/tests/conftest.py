import json

import pytest
import torch

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "a", "is", "on", "to", "cat", "dog", "sat", "ran", "mat",
    "bank", "river", "money", "water", "flows", "deposit", "grows",
    "play", "##ing", "big", "small", "field", "<num>", "<", ">", "num", ".", "-",
]


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A small randomly-initialized BERT checkpoint saved locally."""
    from transformers import BertConfig, BertModel

    d = tmp_path_factory.mktemp("tinybert")
    (d / "vocab.txt").write_text("\n".join(VOCAB) + "\n", encoding="utf-8")
    (d / "tokenizer_config.json").write_text(
        json.dumps({"tokenizer_class": "BertTokenizer", "do_lower_case": True}),
        encoding="utf-8",
    )
    torch.manual_seed(0)
    cfg = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=4,
        num_attention_heads=4,
        intermediate_size=64,
        max_position_embeddings=160,
    )
    BertModel(cfg).save_pretrained(d)
    return d


@pytest.fixture(scope="session")
def fixture_corpus(tmp_path_factory):
    """Two-slice corpus: 'bank' shifts context, 'playing' splits into pieces."""
    records = [
        {"id": "t1", "time": "2015", "text": "The river bank is big and the water flows."},
        {"id": "t2", "time": "2015", "text": "The cat sat on the river bank near the water."},
        {"id": "t3", "time": "2015", "text": "A dog is playing on the bank by the river."},
        {"id": "p1", "time": "2021", "text": "The bank is where the money deposit grows."},
        {"id": "p2", "time": "2021", "text": "My money is in the bank and the deposit grows."},
        {"id": "p3", "time": "2021", "text": "The cat is playing with the dog on the mat."},
        # exercised by the loader: non-English and too-short lines are dropped
        {"id": "zh", "time": "2015", "text": "这是一个中文句子没有英文内容"},
        {"id": "shrt", "time": "2015", "text": "the cat"},
    ]
    path = tmp_path_factory.mktemp("corpus") / "corpus.jsonl"
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    return path


@pytest.fixture(scope="session")
def candidates_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cands") / "candidates.tsv"
    rows = [("bank", 0.1, 3, 2), ("playing", 0.2, 1, 1), ("cat", 0.3, 2, 1), ("zebra", 0.4, 0, 0)]
    with path.open("w", encoding="utf-8") as fh:
        for word, score, c_t, c_tp in rows:
            fh.write(f"{word}\t{score}\t{c_t}\t{c_tp}\n")
    return path
