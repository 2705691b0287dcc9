import json
import math

import numpy as np
import pytest

from semshift import embeddings
from semshift.errors import DimMismatch, MalformedRecord, WordAbsent, ZeroVector
from tests.conftest import make_doc, make_slice


def occurrence(window, center, word=None, doc_id="d0", position=None):
    return embeddings.UsageOccurrence(
        word=word or window[center],
        doc_id=doc_id,
        position=center if position is None else position,
        window=tuple(window),
        time_label="t",
        center=center,
    )


class TestCollectOccurrences:
    def test_short_doc_full_window(self):
        sl = make_slice("t", [make_doc("d0", ["a", "b", "w", "c", "d"])])
        occs = embeddings.collect_occurrences(sl, "w", 128)
        assert len(occs) == 1
        assert occs[0].window == ("a", "b", "w", "c", "d")
        assert occs[0].center == 2
        assert occs[0].position == 2

    def test_long_doc_clipping(self):
        tokens = ["x"] * 300
        tokens[150] = "w"
        sl = make_slice("t", [make_doc("d0", tokens)])
        (occ,) = embeddings.collect_occurrences(sl, "w", 128)
        # clipping arithmetic: left 63, right 64 => tokens 87..214 inclusive
        assert len(occ.window) == 128
        assert occ.center == 63
        assert occ.window[63] == "w"
        assert occ.position == 150

    def test_word_absent(self):
        sl = make_slice("t", [make_doc("d0", ["a", "b", "c"])])
        with pytest.raises(WordAbsent):
            embeddings.collect_occurrences(sl, "zz")

    def test_count_equals_tf(self):
        rng = np.random.default_rng(7)
        vocab = [f"w{c}" for c in "abcdefg"]
        docs = []
        for i in range(20):
            toks = [vocab[j] for j in rng.integers(0, len(vocab), size=rng.integers(3, 40))]
            docs.append(make_doc(f"d{i}", toks))
        sl = make_slice("t", docs)
        for word in vocab:
            tf = sum(t == word for d in docs for t in d.tokens)
            if tf == 0:
                continue
            assert len(embeddings.collect_occurrences(sl, word, 16)) == tf

    def test_window_size_validation(self):
        sl = make_slice("t", [make_doc("d0", ["a", "b", "c"])])
        with pytest.raises(ValueError):
            embeddings.collect_occurrences(sl, "a", 2)


class TestInterchange:
    def header(self, dim=4):
        return json.dumps({"format": "semshift-emb", "version": 1, "dim": dim})

    def record(self, word="bank", time="2015", doc_id="d0", position=0, vector=(1, 0, 0, 0)):
        return json.dumps(
            {"word": word, "time": time, "doc_id": doc_id, "position": position, "vector": list(vector)}
        )

    def test_two_records_one_matrix(self, tmp_path):
        p = tmp_path / "e.jsonl"
        p.write_text(
            "\n".join([self.header(), self.record(position=0), self.record(position=5)]) + "\n"
        )
        out = embeddings.read_embedding_file(p)
        m = out[("bank", "2015")]
        assert m.n == 2 and m.dim == 4
        assert m.occurrence_refs == [("d0", 0), ("d0", 5)]

    def test_dim_mismatch(self, tmp_path):
        p = tmp_path / "e.jsonl"
        p.write_text(
            "\n".join([self.header(), self.record(), self.record(vector=(1, 0, 0, 0, 0))]) + "\n"
        )
        with pytest.raises(DimMismatch):
            embeddings.read_embedding_file(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "e.jsonl"
        p.write_text("")
        assert embeddings.read_embedding_file(p) == {}

    def test_missing_header(self, tmp_path):
        p = tmp_path / "e.jsonl"
        p.write_text(self.record() + "\n")
        with pytest.raises(MalformedRecord):
            embeddings.read_embedding_file(p)

    def test_bad_json_record(self, tmp_path):
        p = tmp_path / "e.jsonl"
        p.write_text(self.header() + "\n{not json\n")
        with pytest.raises(MalformedRecord):
            embeddings.read_embedding_file(p)

    def test_roundtrip(self, tmp_path):
        src = tmp_path / "src.jsonl"
        lines = [self.header()]
        rng = np.random.default_rng(3)
        for w in ("alpha", "beta"):
            for t in ("t", "tp"):
                for i in range(3):
                    lines.append(
                        self.record(w, t, f"d{i}", i, tuple(rng.normal(size=4).round(4)))
                    )
        src.write_text("\n".join(lines) + "\n")
        first = embeddings.read_embedding_file(src)
        dst = tmp_path / "dst.jsonl"
        embeddings.write_embedding_file(first, dst)
        second = embeddings.read_embedding_file(dst)
        assert set(first) == set(second)
        for key in first:
            np.testing.assert_allclose(first[key].rows, second[key].rows, rtol=1e-6)
            assert first[key].occurrence_refs == second[key].occurrence_refs


class TestNormalize:
    def matrix(self, rows):
        rows = np.asarray(rows, dtype=float)
        return embeddings.UsageMatrix(
            word="w", time_label="t", rows=rows, occurrence_refs=[("d", i) for i in range(len(rows))]
        )

    def test_three_four_five(self):
        out = embeddings.normalize_matrix(self.matrix([[3.0, 4.0]]))
        np.testing.assert_allclose(out.rows, [[0.6, 0.8]], atol=1e-12)

    def test_unit_row_unchanged(self):
        out = embeddings.normalize_matrix(self.matrix([[1.0, 0.0]]))
        np.testing.assert_allclose(out.rows, [[1.0, 0.0]], atol=0)

    def test_quarter(self):
        out = embeddings.normalize_matrix(self.matrix([[1.0, 1.0, 1.0, 1.0]]))
        np.testing.assert_allclose(out.rows, [[0.5] * 4], atol=1e-12)

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            embeddings.normalize_matrix(self.matrix([[1.0, 0.0], [0.0, 0.0]]))

    def test_idempotent_and_unit_norms(self):
        rng = np.random.default_rng(11)
        m = self.matrix(rng.normal(size=(12, 6)))
        once = embeddings.normalize_matrix(m)
        twice = embeddings.normalize_matrix(once)
        np.testing.assert_allclose(np.linalg.norm(once.rows, axis=1), 1.0, atol=1e-9)
        np.testing.assert_allclose(once.rows, twice.rows, atol=1e-12)


class TestFallbackEmbed:
    def test_identical_windows_identical_vectors(self):
        a = occurrence(["u", "w", "v"], 1, doc_id="da", position=9)
        b = occurrence(["u", "w", "v"], 1, doc_id="db", position=2)
        np.testing.assert_array_equal(
            embeddings.fallback_embed(a, 16, seed=4), embeddings.fallback_embed(b, 16, seed=4)
        )

    def test_single_context_token(self):
        occ = occurrence(["w", "c"], 0)
        vec = embeddings.fallback_embed(occ, 8, seed=0)
        assert np.count_nonzero(vec) == 1
        assert abs(vec[vec != 0][0]) == 1.0

    def test_dim_validation(self):
        occ = occurrence(["w", "c"], 0)
        with pytest.raises(ValueError):
            embeddings.fallback_embed(occ, 4, seed=0)

    def test_disjoint_contexts_low_cosine(self):
        # Monte-Carlo over 1000 seeds with a brute-force cosine oracle
        ctx_a = [f"a{c}" for c in "bcdefghijk"]
        ctx_b = [f"b{c}" for c in "bcdefghijk"]
        occ_a = occurrence(["w"] + ctx_a, 0)
        occ_b = occurrence(["w"] + ctx_b, 0)
        low = 0
        for seed in range(1000):
            va = embeddings.fallback_embed(occ_a, 256, seed)
            vb = embeddings.fallback_embed(occ_b, 256, seed)
            cos = float(va @ vb) / (math.sqrt(float(va @ va)) * math.sqrt(float(vb @ vb)))
            if cos < 0.5:
                low += 1
        assert low >= 990
