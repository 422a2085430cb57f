"""Per-facet and per-sentence embedding storage with brute-force cosine scoring.

Embedding inference lives outside this module behind the EmbeddingProvider
protocol; a seeded hash embedder stands in for real models in tests. Vector
files use the HYBRIDVEC text format (see ``save_vectors``); facet vectors
are never stored, they are recomputed as sentence means on load so the
averaging invariant is enforced by construction.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Protocol, Sequence

import numpy as np

from hybridrank.corpus import FACETS, Corpus
from hybridrank.textproc import segment_sentences, tokenize

log = logging.getLogger(__name__)

FORMAT_NAME = "HYBRIDVEC"
FORMAT_VERSION = 1


class VectorFormatError(Exception):
    """Malformed, truncated, or dimension-mismatched vector file."""


class EmbeddingProvider(Protocol):
    """Deterministic text-to-vector mapping with a fixed dimension."""

    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


@dataclass
class FacetVectors:
    """Sentence vectors per facet; facet vector is the sentence mean."""

    sentence_vectors: dict[str, list[np.ndarray]] = field(default_factory=dict)

    def facet_vector(self, facet: str) -> Optional[np.ndarray]:
        vecs = self.sentence_vectors.get(facet)
        if not vecs:
            return None
        return np.mean(vecs, axis=0)

    def sentences(self, facet: str) -> list[np.ndarray]:
        return self.sentence_vectors.get(facet, [])


class VectorIndex:
    """doc_id -> FacetVectors at a fixed dimension; immutable after build."""

    def __init__(self, dimension: int, facet_names: Sequence[str] = FACETS):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension
        self.facet_names = tuple(facet_names)
        self.by_doc: dict[str, FacetVectors] = {}
        self.missing: set[str] = set()

    def get(self, doc_id: str) -> Optional[FacetVectors]:
        return self.by_doc.get(doc_id)

    def __len__(self) -> int:
        return len(self.by_doc)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.by_doc


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; zero-norm vectors score 0 by convention."""
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


class HashEmbedder:
    """Deterministic test embedder: seeded hashing of tokens to unit vectors.

    Each token maps to a pseudo-random unit vector derived from
    sha256(seed, token); a text embeds as the renormalized sum of its token
    vectors. Identical texts give identical vectors; disjoint-vocabulary
    texts are near-orthogonal in expectation.
    """

    def __init__(self, dimension: int, seed: int = 0):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension
        self.seed = seed
        self._token_cache: dict[str, np.ndarray] = {}

    def _token_vector(self, token: str) -> np.ndarray:
        vec = self._token_cache.get(token)
        if vec is None:
            digest = hashlib.sha256(f"{self.seed}:{token}".encode("utf-8")).digest()
            rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
            vec = rng.standard_normal(self.dimension)
            vec /= np.linalg.norm(vec)
            self._token_cache[token] = vec
        return vec

    def embed(self, text: str) -> np.ndarray:
        tokens = tokenize(text, frozenset())
        if not tokens:
            return np.zeros(self.dimension)
        total = np.sum([self._token_vector(t) for t in tokens], axis=0)
        norm = np.linalg.norm(total)
        if norm == 0.0:
            return np.zeros(self.dimension)
        return total / norm


def build_vector_index(corpus: Corpus, provider: EmbeddingProvider) -> VectorIndex:
    """Embed every facet sentence of every document."""
    index = VectorIndex(provider.dimension)
    for doc in corpus:
        fv = FacetVectors()
        for facet in FACETS:
            vecs = []
            for sentence in segment_sentences(doc.facet(facet)):
                try:
                    vec = np.asarray(provider.embed(sentence.text), dtype=float)
                except Exception as exc:
                    raise RuntimeError(
                        f"embedding failed for doc {doc.doc_id!r} facet {facet!r}: {exc}"
                    ) from exc
                if vec.shape != (provider.dimension,):
                    raise VectorFormatError(
                        f"provider returned dimension {vec.shape} for doc {doc.doc_id!r}, "
                        f"expected ({provider.dimension},)"
                    )
                vecs.append(vec)
            fv.sentence_vectors[facet] = vecs
        index.by_doc[doc.doc_id] = fv
    return index


def save_vectors(index: VectorIndex, path: str | Path) -> None:
    """Write the HYBRIDVEC text format.

    Header line ``HYBRIDVEC 1 <D>``; then per document: a doc_id line,
    then for each facet a marker ``facet <name> <count>`` followed by
    ``count`` lines of D space-separated reals (sentence vectors in
    sentence order). Values use shortest round-trip decimal repr so a
    save/load cycle is bit-exact.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"{FORMAT_NAME} {FORMAT_VERSION} {index.dimension}\n")
        for doc_id in sorted(index.by_doc):
            fv = index.by_doc[doc_id]
            fh.write(doc_id + "\n")
            for facet in index.facet_names:
                vecs = fv.sentences(facet)
                fh.write(f"facet {facet} {len(vecs)}\n")
                for vec in vecs:
                    fh.write(" ".join(repr(float(x)) for x in vec) + "\n")


def _iter_records(
    path: Path, facet_names: Sequence[str]
) -> Iterator[tuple[str, FacetVectors, int]]:
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[0] != FORMAT_NAME:
            raise VectorFormatError(f"{path}: missing {FORMAT_NAME} header")
        if int(header[1]) != FORMAT_VERSION:
            raise VectorFormatError(f"{path}: format version {header[1]}, expected {FORMAT_VERSION}")
        dim = int(header[2])
        while True:
            doc_line = fh.readline()
            if not doc_line:
                return
            doc_id = doc_line.rstrip("\n")
            if not doc_id:
                continue
            fv = FacetVectors()
            for facet in facet_names:
                marker = fh.readline().split()
                if len(marker) != 3 or marker[0] != "facet" or marker[1] != facet:
                    raise VectorFormatError(
                        f"{path}: expected 'facet {facet} <count>' marker in record {doc_id!r}"
                    )
                count = int(marker[2])
                vecs = []
                for _ in range(count):
                    line = fh.readline()
                    if not line:
                        raise VectorFormatError(f"{path}: truncated record {doc_id!r}")
                    values = np.array([float(x) for x in line.split()], dtype=float)
                    if values.shape != (dim,):
                        raise VectorFormatError(
                            f"{path}: vector of dimension {values.shape[0]} in record "
                            f"{doc_id!r}, header says {dim}"
                        )
                    if not np.all(np.isfinite(values)):
                        raise VectorFormatError(f"{path}: non-finite vector in record {doc_id!r}")
                    vecs.append(values)
                fv.sentence_vectors[facet] = vecs
            yield doc_id, fv, dim


def load_vectors(
    path: str | Path,
    corpus: Corpus | None = None,
    expected_dim: int | None = None,
    facet_names: Sequence[str] = FACETS,
) -> VectorIndex:
    """Load a HYBRIDVEC file, attaching vectors by doc_id.

    Entries naming ids outside ``corpus`` (when given) are skipped with a
    warning; dimension mismatch against ``expected_dim`` and truncation are
    fatal. Corpus documents absent from the file land in ``index.missing``.
    """
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().split()
    if len(header) != 3 or header[0] != FORMAT_NAME:
        raise VectorFormatError(f"{path}: missing {FORMAT_NAME} header")
    dim = int(header[2])
    if expected_dim is not None and dim != expected_dim:
        raise VectorFormatError(f"{path}: vector dimension {dim}, index expects {expected_dim}")
    index = VectorIndex(dim, facet_names)
    for doc_id, fv, _ in _iter_records(path, facet_names):
        if corpus is not None and doc_id not in corpus.id_lookup:
            log.warning("vector file names unknown doc_id %r; entry skipped", doc_id)
            continue
        index.by_doc[doc_id] = fv
    if corpus is not None:
        index.missing = {doc.doc_id for doc in corpus} - set(index.by_doc)
        for doc_id in sorted(index.missing):
            log.warning("document %r has no vectors in %s", doc_id, path)
    return index
