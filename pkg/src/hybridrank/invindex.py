"""Faceted inverted index with BM25 and DFR InL2 scoring.

Each document contributes three facets (title, abstract, fulltext) indexed
separately, so scorers can weight facets and per-facet statistics stay
honest (a short title is not penalized against fulltext lengths).

Persistence is a versioned binary file; see ``save``/``load`` for the exact
layout. Loading a file with a different version fails loudly.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from hybridrank.corpus import FACETS, Corpus
from hybridrank.textproc import DEFAULT_STOPWORDS, tokenize

MAGIC = b"HYBIDX\x00"
VERSION = 1


class IndexFormatError(Exception):
    """Corrupt or version-mismatched index file."""


@dataclass(frozen=True)
class Bm25Params:
    """Okapi BM25 free parameters (k1 >= 0, 0 <= b <= 1)."""

    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self) -> None:
        if self.k1 < 0:
            raise ValueError("k1 must be >= 0")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must be in [0, 1]")


class InvertedIndex:
    """Immutable-after-build faceted inverted index.

    Attributes:
        doc_ids: corpus order; positions index every per-document array.
        postings: facet -> term -> {doc position: term frequency}.
        doc_len: facet -> per-document token counts.
    """

    def __init__(self, doc_ids: list[str], stopwords: frozenset[str] = DEFAULT_STOPWORDS):
        self.doc_ids = doc_ids
        self.id_to_pos = {d: i for i, d in enumerate(doc_ids)}
        self.stopwords = stopwords
        self.postings: dict[str, dict[str, dict[int, int]]] = {f: {} for f in FACETS}
        self.doc_len: dict[str, list[int]] = {f: [0] * len(doc_ids) for f in FACETS}

    # -- statistics -------------------------------------------------------

    @property
    def doc_count(self) -> int:
        return len(self.doc_ids)

    def doc_freq(self, term: str, facet: str) -> int:
        return len(self.postings[facet].get(term, ()))

    def term_freq(self, term: str, pos: int, facet: str) -> int:
        return self.postings[facet].get(term, {}).get(pos, 0)

    def avg_facet_length(self, facet: str) -> float:
        lengths = self.doc_len[facet]
        return sum(lengths) / len(lengths) if lengths else 0.0

    def collection_term_count(self, facet: str) -> int:
        return sum(self.doc_len[facet])

    def collection_freq(self, term: str, facet: str) -> int:
        return sum(self.postings[facet].get(term, {}).values())

    def vocabulary(self, facet: str) -> Iterable[str]:
        return self.postings[facet].keys()

    # -- scoring ----------------------------------------------------------

    def bm25_score(
        self,
        query_tokens: Sequence[str],
        pos: int,
        facet: str,
        params: Bm25Params = Bm25Params(),
    ) -> float:
        """Okapi BM25 with +1-smoothed idf (never negative).

        score = sum_t ln(1 + (N-n+0.5)/(n+0.5)) * tf*(k1+1) / (tf + k1*(1-b+b*dl/avgdl))
        """
        avgdl = self.avg_facet_length(facet)
        if avgdl == 0.0:
            return 0.0
        n_docs = self.doc_count
        dl = self.doc_len[facet][pos]
        score = 0.0
        for term in query_tokens:
            tf = self.term_freq(term, pos, facet)
            if tf == 0:
                continue
            n = self.doc_freq(term, facet)
            idf = math.log(1.0 + (n_docs - n + 0.5) / (n + 0.5))
            denom = tf + params.k1 * (1.0 - params.b + params.b * dl / avgdl)
            score += idf * tf * (params.k1 + 1.0) / denom
        return score

    def dfr_inl2_score(
        self,
        query_tokens: Sequence[str],
        pos: int,
        facet: str,
        c: float = 1.0,
    ) -> float:
        """DFR I(n)L2: inverse document frequency model, Laplace after-effect,
        H2 length normalization.

        Per term: tfn = tf * log2(1 + c*avgdl/dl);
        weight = tfn/(tfn+1) * log2((N+1)/(n+0.5)). Zero-length facets score 0.
        """
        return self.dfr_inl2_weighted({t: 1.0 for t in query_tokens}, pos, facet, c, _multiset=query_tokens)

    def dfr_inl2_weighted(
        self,
        term_weights: Mapping[str, float],
        pos: int,
        facet: str,
        c: float = 1.0,
        _multiset: Sequence[str] | None = None,
    ) -> float:
        """DFR InL2 with per-term weight multipliers (RM3 expanded queries).

        When ``_multiset`` is given, duplicate query tokens contribute once
        per occurrence (plain-query behavior); otherwise each term counts
        once, scaled by its weight.
        """
        if c <= 0:
            raise ValueError("c must be > 0")
        dl = self.doc_len[facet][pos]
        if dl == 0:
            return 0.0
        avgdl = self.avg_facet_length(facet)
        n_docs = self.doc_count
        score = 0.0
        terms = _multiset if _multiset is not None else term_weights.keys()
        for term in terms:
            tf = self.term_freq(term, pos, facet)
            if tf == 0:
                continue
            n = self.doc_freq(term, facet)
            tfn = tf * math.log2(1.0 + c * avgdl / dl)
            weight = term_weights[term] if _multiset is None else 1.0
            score += weight * (tfn / (tfn + 1.0)) * math.log2((n_docs + 1.0) / (n + 0.5))
        return score

    def top_k(
        self,
        query_tokens: Sequence[str],
        facet_weights: Mapping[str, float],
        k: int,
        scorer: str = "bm25",
        params: Bm25Params = Bm25Params(),
        c: float = 1.0,
        candidates: Iterable[int] | None = None,
    ) -> list[tuple[str, float]]:
        """Rank documents by weighted sum of per-facet scores.

        Only documents matching at least one query token are scored. Ties
        break by ascending doc_id so rankings are byte-reproducible.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        if candidates is None:
            cand: set[int] = set()
            for facet, weight in facet_weights.items():
                if weight == 0:
                    continue
                for term in set(query_tokens):
                    cand.update(self.postings[facet].get(term, ()))
        else:
            cand = set(candidates)
        scored = []
        for pos in cand:
            total = 0.0
            for facet, weight in facet_weights.items():
                if weight == 0:
                    continue
                if scorer == "bm25":
                    total += weight * self.bm25_score(query_tokens, pos, facet, params)
                elif scorer == "dfr":
                    total += weight * self.dfr_inl2_score(query_tokens, pos, facet, c)
                else:
                    raise ValueError(f"unknown scorer {scorer!r}")
            if total > 0.0:
                scored.append((self.doc_ids[pos], total))
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        return scored[:k]

    # -- persistence ------------------------------------------------------

    def save(self, path: str | Path) -> None:
        """Write the index as a versioned binary file.

        Layout (little-endian):
          magic "HYBIDX\\x00" + u8 version
          u32 doc count, then per doc: u32 utf8-length + doc_id bytes
          u32 stopword count, then per stopword: u32 length + bytes (sorted)
          u8 facet count, then per facet:
            u32 name length + name bytes
            doc-count u32 facet lengths
            u32 term count, then per term (sorted):
              u32 term length + term bytes
              u32 posting count, then pairs of (u32 doc position, u32 tf)
        """
        path = Path(path)
        with path.open("wb") as fh:
            fh.write(MAGIC + bytes([VERSION]))
            fh.write(struct.pack("<I", len(self.doc_ids)))
            for doc_id in self.doc_ids:
                raw = doc_id.encode("utf-8")
                fh.write(struct.pack("<I", len(raw)) + raw)
            stop_sorted = sorted(self.stopwords)
            fh.write(struct.pack("<I", len(stop_sorted)))
            for word in stop_sorted:
                raw = word.encode("utf-8")
                fh.write(struct.pack("<I", len(raw)) + raw)
            fh.write(bytes([len(FACETS)]))
            for facet in FACETS:
                raw = facet.encode("utf-8")
                fh.write(struct.pack("<I", len(raw)) + raw)
                fh.write(struct.pack(f"<{len(self.doc_ids)}I", *self.doc_len[facet]))
                terms = sorted(self.postings[facet])
                fh.write(struct.pack("<I", len(terms)))
                for term in terms:
                    raw = term.encode("utf-8")
                    fh.write(struct.pack("<I", len(raw)) + raw)
                    plist = sorted(self.postings[facet][term].items())
                    fh.write(struct.pack("<I", len(plist)))
                    for pos, tf in plist:
                        fh.write(struct.pack("<II", pos, tf))

    @classmethod
    def load(cls, path: str | Path) -> "InvertedIndex":
        data = Path(path).read_bytes()
        view = memoryview(data)
        if data[: len(MAGIC)] != MAGIC:
            raise IndexFormatError(f"{path}: not an index file (bad magic)")
        version = data[len(MAGIC)]
        if version != VERSION:
            raise IndexFormatError(f"{path}: index version {version}, expected {VERSION}")
        offset = len(MAGIC) + 1

        def read_u32() -> int:
            nonlocal offset
            (value,) = struct.unpack_from("<I", view, offset)
            offset += 4
            return value

        def read_str() -> str:
            nonlocal offset
            length = read_u32()
            value = bytes(view[offset : offset + length]).decode("utf-8")
            offset += length
            return value

        try:
            n_docs = read_u32()
            doc_ids = [read_str() for _ in range(n_docs)]
            stopwords = frozenset(read_str() for _ in range(read_u32()))
            index = cls(doc_ids, stopwords)
            n_facets = data[offset]
            offset += 1
            for _ in range(n_facets):
                facet = read_str()
                if facet not in index.postings:
                    raise IndexFormatError(f"{path}: unknown facet {facet!r}")
                lengths = struct.unpack_from(f"<{n_docs}I", view, offset)
                offset += 4 * n_docs
                index.doc_len[facet] = list(lengths)
                for _ in range(read_u32()):
                    term = read_str()
                    plist = {}
                    for _ in range(read_u32()):
                        pos, tf = struct.unpack_from("<II", view, offset)
                        offset += 8
                        plist[pos] = tf
                    index.postings[facet][term] = plist
        except (struct.error, IndexError, UnicodeDecodeError) as exc:
            raise IndexFormatError(f"{path}: truncated index file") from exc
        return index


def build_index(corpus: Corpus, stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> InvertedIndex:
    """Index every (term, document, facet) occurrence of the corpus."""
    if len(corpus) == 0:
        raise ValueError("cannot index an empty corpus")
    index = InvertedIndex([doc.doc_id for doc in corpus], stopwords)
    for pos, doc in enumerate(corpus):
        for facet in FACETS:
            tokens = tokenize(doc.facet(facet), stopwords)
            index.doc_len[facet][pos] = len(tokens)
            counts: dict[str, int] = {}
            for token in tokens:
                counts[token] = counts.get(token, 0) + 1
            facet_postings = index.postings[facet]
            for term, tf in counts.items():
                facet_postings.setdefault(term, {})[pos] = tf
    return index
