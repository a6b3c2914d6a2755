"""Word vector loading, IDF statistics, and term embeddings."""

from __future__ import annotations

import logging
import math
import random
import struct

import numpy as np
import pytest

from ontoalign.embedding import (
    IdfTable,
    WordVectorTable,
    compute_idf,
    embed_corpus,
    load_embeddings,
    load_idf,
    load_word_vectors,
    save_embeddings,
    save_idf,
    term_embedding,
)
from ontoalign.errors import EmptyLabel, FormatError
from oracles import weighted_average_reference


class TestLoadWordVectors:
    def test_basic_file(self, tmp_path):
        path = tmp_path / "vectors.txt"
        path.write_text(
            "tumor 0.1 0.2 0.3 0.4\nregion 1 2 3 4\ncell -1 0 1 0.5\n", encoding="utf-8"
        )
        table = load_word_vectors(path)
        assert table.dimension == 4
        assert set(table.entries) == {"tumor", "region", "cell"}
        np.testing.assert_allclose(table.entries["region"], [1, 2, 3, 4])
        expected_default = np.mean(
            [table.entries["tumor"], table.entries["region"], table.entries["cell"]], axis=0
        )
        np.testing.assert_array_equal(table.default_vector, expected_default)

    def test_non_numeric_component(self, tmp_path):
        path = tmp_path / "vectors.txt"
        path.write_text("tumor 0.1 0.2 x 0.4\n", encoding="utf-8")
        with pytest.raises(FormatError) as info:
            load_word_vectors(path)
        assert info.value.line == 1

    def test_wrong_arity(self, tmp_path):
        path = tmp_path / "vectors.txt"
        path.write_text("tumor 0.1 0.2\nregion 1 2 3\n", encoding="utf-8")
        with pytest.raises(FormatError) as info:
            load_word_vectors(path)
        assert info.value.line == 2

    def test_empty_file(self, tmp_path):
        path = tmp_path / "vectors.txt"
        path.write_text("", encoding="utf-8")
        with pytest.raises(FormatError):
            load_word_vectors(path)

    def test_duplicate_word_later_wins(self, tmp_path, caplog):
        path = tmp_path / "vectors.txt"
        path.write_text("tumor 1 1\ntumor 2 2\n", encoding="utf-8")
        with caplog.at_level(logging.WARNING):
            table = load_word_vectors(path)
        np.testing.assert_array_equal(table.entries["tumor"], [2.0, 2.0])
        assert any("duplicate word" in message for message in caplog.messages)


class TestComputeIdf:
    def test_formula(self):
        docs = [["common", "rare"] if i < 5 else ["common"] for i in range(10)]
        table = compute_idf(docs, min_doc_freq=5)
        assert table.entries["rare"] == pytest.approx(math.log(2), abs=1e-12)

    def test_min_doc_freq_drop(self):
        docs = [["word"] if i < 4 else ["other"] for i in range(10)]
        table = compute_idf(docs, min_doc_freq=5)
        assert "word" not in table.entries

    def test_everywhere_word_floored_positive(self):
        docs = [["ubiquitous"] for _ in range(10)]
        table = compute_idf(docs, min_doc_freq=5)
        assert table.entries["ubiquitous"] == pytest.approx(math.log(10 / 9.5), abs=1e-12)
        assert table.entries["ubiquitous"] > 0

    def test_df_monotonicity(self):
        rng = random.Random(21)
        words = [f"w{k}" for k in range(20)]
        docs = [[w for w in words if rng.random() < 0.5] for _ in range(60)]
        table = compute_idf(docs, min_doc_freq=1)
        df = {w: sum(w in doc for doc in docs) for w in words}
        for w1 in words:
            for w2 in words:
                if df[w1] > df[w2]:
                    assert table.entries[w1] < table.entries[w2]

    def test_multiple_occurrences_count_once(self):
        docs = [["dup", "dup", "dup"], ["dup"], ["other"]]
        table = compute_idf(docs, min_doc_freq=1)
        assert table.entries["dup"] == pytest.approx(math.log(3 / 2), abs=1e-12)


class TestTermEmbedding:
    def test_single_known_word(self, toy_vectors_idf):
        vectors, idf = toy_vectors_idf
        out = term_embedding("tumor", vectors, idf)
        np.testing.assert_array_equal(out.vector, vectors.entries["tumor"])

    def test_equal_weights_give_mean(self):
        vectors = WordVectorTable(
            dimension=2,
            entries={"a": np.array([2.0, 0.0]), "b": np.array([0.0, 4.0])},
            default_vector=np.zeros(2),
        )
        idf = IdfTable(entries={"a": 1.5, "b": 1.5})
        out = term_embedding("a b", vectors, idf)
        np.testing.assert_allclose(out.vector, [1.0, 2.0], atol=1e-12)

    def test_oov_rule_hand_derived(self):
        # "tumor zzqx" with idf(tumor)=2.0: (2.0*v_tumor + 0.01*default) / 2.01
        v_tumor = np.array([1.0, -2.0, 0.5])
        default = np.array([0.2, 0.2, 0.2])
        vectors = WordVectorTable(dimension=3, entries={"tumor": v_tumor}, default_vector=default)
        idf = IdfTable(entries={"tumor": 2.0})
        out = term_embedding("tumor zzqx", vectors, idf)
        expected = (2.0 * v_tumor + 0.01 * default) / 2.01
        np.testing.assert_allclose(out.vector, expected, atol=1e-6)

    def test_matches_direct_weighted_average(self, toy_vectors_idf):
        vectors, idf = toy_vectors_idf
        rng = random.Random(22)
        words = list(vectors.entries) + ["oovword", "zzqx"]
        for _ in range(300):
            label = " ".join(rng.choices(words, k=rng.randint(1, 5)))
            mine = term_embedding(label, vectors, idf).vector
            reference = weighted_average_reference(
                label, vectors.entries, vectors.default_vector, idf.entries, idf.default_idf
            )
            np.testing.assert_allclose(mine, reference, atol=1e-6)

    def test_permutation_invariance_is_exact(self, toy_vectors_idf):
        vectors, idf = toy_vectors_idf
        rng = random.Random(23)
        words = list(vectors.entries)
        for _ in range(100):
            tokens = rng.choices(words, k=rng.randint(2, 5))
            shuffled = tokens[:]
            rng.shuffle(shuffled)
            a = term_embedding(" ".join(tokens), vectors, idf).vector
            b = term_embedding(" ".join(shuffled), vectors, idf).vector
            np.testing.assert_array_equal(a, b)

    def test_idf_scaling_invariance(self, toy_vectors_idf):
        vectors, idf = toy_vectors_idf
        label = "tumor region cell"
        base = term_embedding(label, vectors, idf).vector
        for scale in (2.0, 0.5, 4.0, 0.25):  # powers of two scale losslessly
            scaled = IdfTable(
                entries={w: v * scale for w, v in idf.entries.items()},
                default_idf=idf.default_idf * scale,
            )
            np.testing.assert_array_equal(term_embedding(label, vectors, scaled).vector, base)
        arbitrary = IdfTable(
            entries={w: v * 3.7 for w, v in idf.entries.items()}, default_idf=idf.default_idf * 3.7
        )
        np.testing.assert_allclose(
            term_embedding(label, vectors, arbitrary).vector, base, atol=1e-12
        )

    def test_components_always_finite(self, toy_vectors_idf):
        vectors, idf = toy_vectors_idf
        out = term_embedding("zzqx qqzz xxqq", vectors, idf)  # all OOV
        assert np.all(np.isfinite(out.vector))
        np.testing.assert_allclose(out.vector, vectors.default_vector, atol=1e-12)

    def test_empty_label_raises(self, toy_vectors_idf):
        vectors, idf = toy_vectors_idf
        with pytest.raises(EmptyLabel):
            term_embedding("   ", vectors, idf)


class TestEmbedCorpus:
    def test_purity_and_order(self, toy_vectors_idf):
        vectors, idf = toy_vectors_idf
        out = embed_corpus(["tumor", "tumor"], vectors, idf)
        np.testing.assert_array_equal(out[0].vector, out[1].vector)
        assert [e.term_label for e in out] == ["tumor", "tumor"]

    def test_word_order_insensitive(self, toy_vectors_idf):
        vectors, idf = toy_vectors_idf
        out = embed_corpus(["region tumor", "tumor region"], vectors, idf)
        np.testing.assert_array_equal(out[0].vector, out[1].vector)

    def test_error_carries_index(self, toy_vectors_idf):
        vectors, idf = toy_vectors_idf
        with pytest.raises(EmptyLabel, match="index 1"):
            embed_corpus(["tumor", " ", "region"], vectors, idf)

    def test_large_batch_parallel_equals_serial(self, toy_vectors_idf):
        vectors, idf = toy_vectors_idf
        rng = random.Random(24)
        words = list(vectors.entries) + ["oov"]
        labels = [" ".join(rng.choices(words, k=rng.randint(1, 4))) for _ in range(100_000)]
        serial = embed_corpus(labels, vectors, idf, workers=1)
        parallel = embed_corpus(labels, vectors, idf, workers=4)
        assert len(serial) == len(parallel) == len(labels)
        for s, p in zip(serial, parallel):
            assert s.term_label == p.term_label
            np.testing.assert_array_equal(s.vector, p.vector)


class TestIdfIO:
    def test_round_trip(self, toy_vectors_idf, tmp_path):
        _, idf = toy_vectors_idf
        path = tmp_path / "idf.tsv"
        save_idf(idf, path)
        loaded = load_idf(path)
        assert loaded.entries == idf.entries

    def test_rejects_nonpositive(self, tmp_path):
        path = tmp_path / "idf.tsv"
        path.write_text("word\t0.0\n", encoding="utf-8")
        with pytest.raises(FormatError):
            load_idf(path)

    def test_rejects_bad_arity(self, tmp_path):
        path = tmp_path / "idf.tsv"
        path.write_text("word\t1.0\textra\n", encoding="utf-8")
        with pytest.raises(FormatError) as info:
            load_idf(path)
        assert info.value.line == 1


class TestEmbeddingsBinary:
    def test_round_trip_via_f32(self, toy_vectors_idf, tmp_path):
        vectors, idf = toy_vectors_idf
        embeddings = embed_corpus(["tumor region", "cell"], vectors, idf)
        path = tmp_path / "embeddings.bin"
        save_embeddings(embeddings, path)
        loaded = load_embeddings(path)
        assert [e.term_label for e in loaded] == ["tumor region", "cell"]
        for original, back in zip(embeddings, loaded):
            np.testing.assert_array_equal(
                back.vector, original.vector.astype(np.float32).astype(np.float64)
            )

    def test_header_layout(self, toy_vectors_idf, tmp_path):
        vectors, idf = toy_vectors_idf
        embeddings = embed_corpus(["tumor"], vectors, idf)
        path = tmp_path / "embeddings.bin"
        save_embeddings(embeddings, path)
        blob = path.read_bytes()
        magic, version, count, dim = struct.unpack("<4sHQI", blob[:18])
        assert (magic, version, count, dim) == (b"OAEM", 1, 1, vectors.dimension)
        (label_len,) = struct.unpack("<I", blob[18:22])
        assert blob[22 : 22 + label_len].decode("utf-8") == "tumor"

    def test_truncated_file_rejected(self, toy_vectors_idf, tmp_path):
        vectors, idf = toy_vectors_idf
        embeddings = embed_corpus(["tumor"], vectors, idf)
        path = tmp_path / "embeddings.bin"
        save_embeddings(embeddings, path)
        path.write_bytes(path.read_bytes()[:-3])
        with pytest.raises(FormatError):
            load_embeddings(path)


class TestEmbeddingStore:
    def test_cache_returns_same_array(self, toy_store):
        first = toy_store.embedding("tumor region")
        second = toy_store.embedding("tumor region")
        assert first is second
