import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridrank.corpus import Corpus, Document
from hybridrank.vectors import (
    HashEmbedder,
    VectorFormatError,
    VectorIndex,
    build_vector_index,
    cosine,
    load_vectors,
    save_vectors,
)


class ToyEmbedder:
    """Maps known sentences to fixed vectors for exact-arithmetic tests."""

    def __init__(self, table, dimension):
        self.table = table
        self.dimension = dimension

    def embed(self, text):
        return np.array(self.table[text], dtype=float)


def test_cosine_identity_orthogonal_derived():
    v = np.array([3.0, 4.0])
    assert cosine(v, v) == pytest.approx(1.0)
    assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0
    assert cosine(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == pytest.approx(1 / math.sqrt(2))


def test_cosine_zero_norm_convention():
    assert cosine(np.zeros(3), np.array([1.0, 2.0, 3.0])) == 0.0


def test_cosine_dimension_mismatch():
    with pytest.raises(ValueError):
        cosine(np.zeros(2), np.zeros(3))


@settings(max_examples=50)
@given(
    st.lists(st.floats(-10, 10), min_size=4, max_size=4),
    st.lists(st.floats(-10, 10), min_size=4, max_size=4),
    st.floats(0.01, 100),
)
def test_cosine_symmetry_and_scale_invariance(u, v, a):
    u, v = np.array(u), np.array(v)
    assert cosine(u, v) == pytest.approx(cosine(v, u))
    assert cosine(a * u, v) == pytest.approx(cosine(u, v), abs=1e-9)
    assert -1.0 - 1e-9 <= cosine(u, v) <= 1.0 + 1e-9


def test_hash_embedder_deterministic():
    e1, e2 = HashEmbedder(32, seed=7), HashEmbedder(32, seed=7)
    np.testing.assert_array_equal(e1.embed("alpha"), e2.embed("alpha"))
    assert cosine(e1.embed("alpha beta"), e2.embed("alpha beta")) == pytest.approx(1.0)


def test_hash_embedder_seed_changes_vectors():
    assert not np.allclose(HashEmbedder(32, 1).embed("alpha"), HashEmbedder(32, 2).embed("alpha"))


def test_hash_embedder_unit_norm():
    vec = HashEmbedder(64, 0).embed("some words here")
    assert np.linalg.norm(vec) == pytest.approx(1.0)


def test_hash_embedder_empty_text():
    assert np.all(HashEmbedder(16, 0).embed("") == 0.0)


def test_hash_embedder_disjoint_vocab_near_orthogonal():
    # Monte-Carlo: 100 disjoint-vocabulary pairs at D=64 average near 0.
    emb = HashEmbedder(64, seed=3)
    sims = []
    for i in range(100):
        a = emb.embed(f"worda{i} wordb{i} wordc{i}")
        b = emb.embed(f"wordx{i} wordy{i} wordz{i}")
        sims.append(cosine(a, b))
    assert abs(np.mean(sims)) < 0.1


def test_build_vector_index_single_sentence_mean():
    corpus = Corpus.from_documents([Document("d1", title="Only sentence here.")])
    emb = HashEmbedder(16, 0)
    index = build_vector_index(corpus, emb)
    fv = index.get("d1")
    np.testing.assert_allclose(fv.facet_vector("title"), emb.embed("Only sentence here."))


def test_build_vector_index_mean_of_two():
    table = {"A one.": [1.0, 0.0], "B two.": [0.0, 1.0]}
    corpus = Corpus.from_documents([Document("d1", abstract="A one. B two.")])
    index = build_vector_index(corpus, ToyEmbedder(table, 2))
    np.testing.assert_allclose(index.get("d1").facet_vector("abstract"), [0.5, 0.5])


def test_build_vector_index_empty_facet_absent():
    corpus = Corpus.from_documents([Document("d1", title="Title.", fulltext="")])
    index = build_vector_index(corpus, HashEmbedder(8, 0))
    assert index.get("d1").facet_vector("fulltext") is None


def test_facet_mean_invariant_holds_for_built_index(tiny_corpus):
    index = build_vector_index(tiny_corpus, HashEmbedder(16, 5))
    for doc in tiny_corpus:
        fv = index.get(doc.doc_id)
        for facet in ("title", "abstract", "fulltext"):
            sents = fv.sentences(facet)
            facet_vec = fv.facet_vector(facet)
            if not sents:
                assert facet_vec is None
            else:
                np.testing.assert_allclose(facet_vec, np.mean(sents, axis=0), atol=1e-6)


def test_vector_file_round_trip_bit_exact(tmp_path, tiny_corpus):
    index = build_vector_index(tiny_corpus, HashEmbedder(12, 9))
    path = tmp_path / "v.hv"
    save_vectors(index, path)
    loaded = load_vectors(path, tiny_corpus)
    assert loaded.dimension == 12
    for doc in tiny_corpus:
        orig, got = index.get(doc.doc_id), loaded.get(doc.doc_id)
        for facet in ("title", "abstract", "fulltext"):
            a, b = orig.sentences(facet), got.sentences(facet)
            assert len(a) == len(b)
            for va, vb in zip(a, b):
                assert np.array_equal(va, vb)  # bit-exact
    save_vectors(loaded, tmp_path / "again.hv")
    assert (tmp_path / "again.hv").read_bytes() == path.read_bytes()


def test_load_dimension_mismatch_fatal(tmp_path, tiny_corpus):
    path = tmp_path / "v.hv"
    save_vectors(build_vector_index(tiny_corpus, HashEmbedder(4, 0)), path)
    with pytest.raises(VectorFormatError, match="dimension"):
        load_vectors(path, tiny_corpus, expected_dim=768)


def test_load_matching_dimension_ok(tmp_path, tiny_corpus):
    path = tmp_path / "v.hv"
    save_vectors(build_vector_index(tiny_corpus, HashEmbedder(4, 0)), path)
    assert load_vectors(path, tiny_corpus, expected_dim=4).dimension == 4


def test_load_unknown_doc_id_skipped_with_warning(tmp_path, tiny_corpus, caplog):
    index = build_vector_index(tiny_corpus, HashEmbedder(4, 0))
    ghost = VectorIndex(4)
    ghost.by_doc = dict(index.by_doc)
    ghost.by_doc["ghost"] = index.by_doc["d1"]
    path = tmp_path / "v.hv"
    save_vectors(ghost, path)
    with caplog.at_level("WARNING"):
        loaded = load_vectors(path, tiny_corpus)
    assert "ghost" not in loaded.by_doc
    assert any("ghost" in r.message for r in caplog.records)


def test_load_flags_missing_documents(tmp_path, tiny_corpus, caplog):
    index = build_vector_index(tiny_corpus, HashEmbedder(4, 0))
    del index.by_doc["d2"]
    path = tmp_path / "v.hv"
    save_vectors(index, path)
    with caplog.at_level("WARNING"):
        loaded = load_vectors(path, tiny_corpus)
    assert loaded.missing == {"d2"}


def test_load_truncated_file_fatal(tmp_path, tiny_corpus):
    path = tmp_path / "v.hv"
    save_vectors(build_vector_index(tiny_corpus, HashEmbedder(4, 0)), path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-2]) + "\n", encoding="utf-8")
    with pytest.raises(VectorFormatError):
        load_vectors(path, tiny_corpus)


def test_load_bad_header(tmp_path):
    path = tmp_path / "v.hv"
    path.write_text("WRONG 1 4\n", encoding="utf-8")
    with pytest.raises(VectorFormatError, match="header"):
        load_vectors(path)
