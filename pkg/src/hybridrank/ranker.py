"""Hybrid lexical+neural ranking.

A document's relevance to a topic is the log-z-normalized sum of BM25
scores over all (topic field, document facet) pairs, plus the sum of
cosine similarities between topic-field vectors and facet vectors over the
same pairs. The log base z is calibrated per topic so the lexically
strongest candidate lands exactly at 9, putting both components on the
same scale (nine cosine pairs bound the neural side by 9).

Also provides the sentence-level reranker (top-3 sentence cosines from
abstract and fulltext, added to the hybrid total for the top of the
ranking) and reciprocal-rank fusion of runs.
"""

from __future__ import annotations

import datetime
import math
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from hybridrank.corpus import FACETS, Corpus
from hybridrank.invindex import Bm25Params, InvertedIndex
from hybridrank.textproc import tokenize, segment_sentences
from hybridrank.trec import TOPIC_FIELDS, RunEntry, Topic
from hybridrank.vectors import EmbeddingProvider, VectorIndex, cosine

TARGET_TOP_LOG = 9.0  # nine (field, facet) pairs; the lexical top is pinned to it


@dataclass(frozen=True)
class ZCalibration:
    """Per-topic log base: z = s_max**(1/9), so log_z(s_max) = 9."""

    z: float
    s_max: float

    @classmethod
    def from_scores(cls, lexical_raw: Sequence[float]) -> Optional["ZCalibration"]:
        """Calibrate from a candidate set's raw lexical scores.

        Returns None when every score is zero (the topic falls back to
        neural-only scoring). s_max <= 1 is clamped just above 1 so z > 1.
        """
        s_max = max(lexical_raw, default=0.0)
        if s_max <= 0.0:
            return None
        if s_max <= 1.0:
            s_max = 1.0 + 1e-12
        return cls(z=s_max ** (1.0 / TARGET_TOP_LOG), s_max=s_max)

    def log_z(self, raw: float) -> float:
        """log base z; raw == 0 maps to 0 by convention (no lexical signal)."""
        if raw <= 0.0:
            return 0.0
        return math.log(raw) / math.log(self.z)


@dataclass(frozen=True)
class HybridScore:
    """Score decomposition for one (topic, document) pair."""

    lexical_raw: float
    lexical_log: float
    neural: float

    @property
    def total(self) -> float:
        return self.lexical_log + self.neural


@dataclass(frozen=True)
class RankConfig:
    """Switches for the hybrid scorer and its ablations."""

    bm25: Bm25Params = Bm25Params()
    facets: tuple[str, ...] = FACETS
    topic_fields: tuple[str, ...] = TOPIC_FIELDS
    use_bm25: bool = True
    use_neural: bool = True
    date_cutoff: Optional[datetime.date] = None
    top_n: int = 1000
    rerank_depth: int = 50
    k_rrf: float = 60.0
    candidate_mode: str = "exhaustive"  # or "bm25-topk"
    candidate_k: int = 1000
    run_tag: str = "nir"

    def without(self, switch: str) -> "RankConfig":
        """Single-switch ablations for the ablation harness."""
        if switch in FACETS:
            return replace(self, facets=tuple(f for f in self.facets if f != switch))
        if switch == "neural":
            return replace(self, use_neural=False)
        if switch == "bm25":
            return replace(self, use_bm25=False)
        if switch == "filter":
            return replace(self, date_cutoff=None)
        raise ValueError(f"unknown ablation switch {switch!r}")


def topic_field_tokens(topic: Topic, index: InvertedIndex) -> dict[str, list[str]]:
    return {name: tokenize(topic.field(name), index.stopwords) for name in TOPIC_FIELDS}


def topic_field_vectors(topic: Topic, provider: EmbeddingProvider) -> dict[str, Optional[np.ndarray]]:
    """Embed each topic field as the mean of its sentence embeddings,
    mirroring how document facet vectors are formed."""
    vectors: dict[str, Optional[np.ndarray]] = {}
    for name in TOPIC_FIELDS:
        sentences = segment_sentences(topic.field(name))
        if not sentences:
            vectors[name] = None
            continue
        vecs = [np.asarray(provider.embed(s.text), dtype=float) for s in sentences]
        vectors[name] = np.mean(vecs, axis=0)
    return vectors


def lexical_component(
    field_tokens: Mapping[str, Sequence[str]],
    pos: int,
    index: InvertedIndex,
    params: Bm25Params,
    facets: Sequence[str] = FACETS,
    topic_fields: Sequence[str] = TOPIC_FIELDS,
) -> float:
    """The raw BM25 double sum over (topic field, facet) pairs (pre-log)."""
    total = 0.0
    for name in topic_fields:
        tokens = field_tokens[name]
        if not tokens:
            continue
        for facet in facets:
            total += index.bm25_score(tokens, pos, facet, params)
    return total


def neural_component(
    field_vectors: Mapping[str, Optional[np.ndarray]],
    doc_vectors,
    facets: Sequence[str] = FACETS,
    topic_fields: Sequence[str] = TOPIC_FIELDS,
) -> float:
    """The cosine double sum; pairs with either side absent contribute 0."""
    if doc_vectors is None:
        return 0.0
    total = 0.0
    for name in topic_fields:
        tvec = field_vectors.get(name)
        if tvec is None:
            continue
        for facet in facets:
            fvec = doc_vectors.facet_vector(facet)
            if fvec is not None:
                total += cosine(tvec, fvec)
    return total


def calibrate_z(lexical_raw: Sequence[float]) -> Optional[ZCalibration]:
    return ZCalibration.from_scores(lexical_raw)


def _candidate_positions(
    corpus: Corpus,
    index: InvertedIndex,
    field_tokens: Mapping[str, Sequence[str]],
    config: RankConfig,
) -> list[int]:
    positions = [
        index.id_to_pos[doc.doc_id]
        for doc in corpus
        if config.date_cutoff is None
        or doc.pub_date is None
        or doc.pub_date >= config.date_cutoff
    ]
    if config.candidate_mode == "exhaustive":
        return positions
    if config.candidate_mode != "bm25-topk":
        raise ValueError(f"unknown candidate mode {config.candidate_mode!r}")
    allowed = set(positions)
    union: set[int] = set()
    all_tokens = [t for name in config.topic_fields for t in field_tokens[name]]
    for facet in config.facets:
        ranked = index.top_k(all_tokens, {facet: 1.0}, config.candidate_k, "bm25", config.bm25)
        union.update(index.id_to_pos[doc_id] for doc_id, _ in ranked)
    return sorted(union & allowed)


def score_topic(
    topic: Topic,
    corpus: Corpus,
    index: InvertedIndex,
    vec_index: Optional[VectorIndex],
    field_vectors: Mapping[str, Optional[np.ndarray]] | None,
    config: RankConfig,
) -> dict[str, HybridScore]:
    """Hybrid score for every candidate document of one topic."""
    field_tokens = topic_field_tokens(topic, index)
    positions = _candidate_positions(corpus, index, field_tokens, config)

    raw: dict[str, float] = {}
    if config.use_bm25:
        for pos in positions:
            raw[index.doc_ids[pos]] = lexical_component(
                field_tokens, pos, index, config.bm25, config.facets, config.topic_fields
            )
    else:
        raw = {index.doc_ids[pos]: 0.0 for pos in positions}

    calibration = calibrate_z(list(raw.values())) if config.use_bm25 else None

    scores: dict[str, HybridScore] = {}
    for pos in positions:
        doc_id = index.doc_ids[pos]
        lexical_raw = raw[doc_id]
        lexical_log = calibration.log_z(lexical_raw) if calibration else 0.0
        neural = 0.0
        if config.use_neural and vec_index is not None and field_vectors is not None:
            neural = neural_component(
                field_vectors, vec_index.get(doc_id), config.facets, config.topic_fields
            )
        scores[doc_id] = HybridScore(lexical_raw, lexical_log, neural)
    return scores


def rank_nir(
    topic: Topic,
    corpus: Corpus,
    index: InvertedIndex,
    vec_index: Optional[VectorIndex] = None,
    provider: Optional[EmbeddingProvider] = None,
    config: RankConfig = RankConfig(),
    field_vectors: Mapping[str, Optional[np.ndarray]] | None = None,
) -> list[RunEntry]:
    """Rank one topic with the hybrid scorer.

    Topic-field vectors come from ``field_vectors`` when given (vector-file
    mode) or are embedded ad hoc with ``provider``.
    """
    if field_vectors is None and provider is not None and config.use_neural:
        field_vectors = topic_field_vectors(topic, provider)
    scores = score_topic(topic, corpus, index, vec_index, field_vectors, config)
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1].total, kv[0]))[: config.top_n]
    return [
        RunEntry(topic.number, doc_id, rank, hs.total, config.run_tag)
        for rank, (doc_id, hs) in enumerate(ordered, start=1)
    ]


def sentence_rerank_term(
    field_vectors: Mapping[str, Optional[np.ndarray]],
    doc_vectors,
    top_n_sentences: int = 3,
    facets: Sequence[str] = ("abstract", "fulltext"),
) -> float:
    """Mean of the top-3 sentence cosines over pooled abstract+fulltext
    sentences, per topic field, summed over fields."""
    if doc_vectors is None:
        return 0.0
    pooled = [vec for facet in facets for vec in doc_vectors.sentences(facet)]
    if not pooled:
        return 0.0
    total = 0.0
    for tvec in field_vectors.values():
        if tvec is None:
            continue
        sims = sorted((cosine(tvec, svec) for svec in pooled), reverse=True)
        top = sims[:top_n_sentences]
        total += sum(top) / len(top)
    return total


def rerank_nirr(
    base: Sequence[RunEntry],
    depth: int,
    field_vectors: Mapping[str, Optional[np.ndarray]],
    vec_index: VectorIndex,
    run_tag: str = "nirr",
) -> list[RunEntry]:
    """Re-sort the top ``depth`` of a run by hybrid total + sentence term.

    Documents below ``depth`` keep their order. Serialized scores are
    clamped to be non-increasing (the reranked block stays above the tail
    by construction, but its adjusted scores may dip below tail scores).
    """
    if depth <= 0:
        return [replace(e, run_tag=run_tag) for e in base]
    head = list(base[:depth])
    tail = list(base[depth:])
    adjusted = [
        (e.doc_id, e.score + sentence_rerank_term(field_vectors, vec_index.get(e.doc_id)))
        for e in head
    ]
    adjusted.sort(key=lambda pair: (-pair[1], pair[0]))
    result = []
    prev = math.inf
    for rank, (doc_id, score) in enumerate(adjusted, start=1):
        score = min(score, prev)
        prev = score
        result.append(RunEntry(base[0].topic, doc_id, rank, score, run_tag))
    for offset, entry in enumerate(tail):
        score = min(entry.score, prev)
        prev = score
        result.append(RunEntry(entry.topic, entry.doc_id, depth + offset + 1, score, run_tag))
    return result


def fuse_runs(
    runs: Sequence[Sequence[RunEntry]],
    k_rrf: float = 60.0,
    run_tag: str = "fusion",
    top_n: int = 1000,
) -> list[RunEntry]:
    """Reciprocal-rank fusion: score(d) = sum over runs of 1/(k + rank).

    Depends only on ranks, never on input scores. Handles multi-topic runs;
    ties break by ascending doc_id.
    """
    if len(runs) < 2:
        raise ValueError("fusion needs at least two runs")
    topics: set[int] = {e.topic for run in runs for e in run}
    fused: list[RunEntry] = []
    for topic in sorted(topics):
        scores: dict[str, float] = {}
        for run in runs:
            for entry in run:
                if entry.topic == topic:
                    scores[entry.doc_id] = scores.get(entry.doc_id, 0.0) + 1.0 / (k_rrf + entry.rank)
        ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
        fused.extend(
            RunEntry(topic, doc_id, rank, score, run_tag)
            for rank, (doc_id, score) in enumerate(ordered, start=1)
        )
    return fused
