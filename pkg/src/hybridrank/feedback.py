"""RM3 query expansion and the DFR relevance-feedback retrieval baseline.

Expansion builds a feedback language model from judged-relevant documents
(or pseudo-relevant DFR results when no judgements exist), Dirichlet-smooths
it against the collection model, keeps the strongest terms, and
interpolates with the original query distribution. Retrieval scores the
expanded query with DFR InL2, using term weights as multipliers.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from hybridrank.corpus import FACETS, Corpus, Document
from hybridrank.invindex import InvertedIndex
from hybridrank.textproc import tokenize
from hybridrank.trec import Qrel, RunEntry, Topic

DEFAULT_MAX_TERMS = 50
DEFAULT_LAMBDA = 0.4
DEFAULT_MU = 2000.0
FEEDBACK_FACETS = ("title", "abstract")


@dataclass
class ExpandedQuery:
    """Term distribution mixing the original query with feedback terms.

    Weights sum to 1; origin marks each term as 'original' or 'expansion'.
    """

    weights: dict[str, float] = field(default_factory=dict)
    origin: dict[str, str] = field(default_factory=dict)

    def expansion_terms(self) -> list[str]:
        return sorted(t for t, o in self.origin.items() if o == "expansion")


def _original_model(query_tokens: Sequence[str]) -> dict[str, float]:
    counts: dict[str, int] = {}
    for token in query_tokens:
        counts[token] = counts.get(token, 0) + 1
    total = len(query_tokens)
    return {t: c / total for t, c in counts.items()}


def rm3_expand(
    query_tokens: Sequence[str],
    feedback_docs: Sequence[Document],
    index: InvertedIndex,
    max_terms: int = DEFAULT_MAX_TERMS,
    lam: float = DEFAULT_LAMBDA,
    mu: float = DEFAULT_MU,
    feedback_facets: Sequence[str] = FEEDBACK_FACETS,
) -> ExpandedQuery:
    """Build an RM3 expanded query.

    The feedback model is the term distribution of the concatenated
    feedback-document facets (length-weighted by construction),
    Dirichlet-smoothed against the collection model with parameter ``mu``.
    The top ``max_terms`` terms by feedback probability (lexicographic
    tie-break) are kept; final weights interpolate
    lam * P_original + (1 - lam) * P_feedback and renormalize.
    ``lam`` weights the ORIGINAL query. Stopwords are already excluded by
    tokenization; pure-digit terms are excluded as expansion noise.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must be in [0, 1]")
    if not query_tokens:
        raise ValueError("empty original query")
    p_orig = _original_model(query_tokens)

    if not feedback_docs:
        expanded = ExpandedQuery(dict(p_orig), {t: "original" for t in p_orig})
        return expanded

    tf_fb: dict[str, int] = {}
    total_len = 0
    for doc in feedback_docs:
        for facet in feedback_facets:
            for token in tokenize(doc.facet(facet), index.stopwords):
                if token.isdigit():
                    continue
                tf_fb[token] = tf_fb.get(token, 0) + 1
                total_len += 1

    coll_len = sum(index.collection_term_count(f) for f in feedback_facets)
    p_fb: dict[str, float] = {}
    for term, tf in tf_fb.items():
        coll_tf = sum(index.collection_freq(term, f) for f in feedback_facets)
        p_coll = coll_tf / coll_len if coll_len else 0.0
        p_fb[term] = (tf + mu * p_coll) / (total_len + mu)

    kept = sorted(p_fb.items(), key=lambda kv: (-kv[1], kv[0]))[:max_terms]
    kept_fb = dict(kept)

    mixed: dict[str, float] = {}
    for term in set(p_orig) | set(kept_fb):
        mixed[term] = lam * p_orig.get(term, 0.0) + (1.0 - lam) * kept_fb.get(term, 0.0)
    mixed = {t: w for t, w in mixed.items() if w > 0.0}
    norm = sum(mixed.values())
    weights = {t: w / norm for t, w in sorted(mixed.items())}
    origin = {t: ("original" if t in p_orig else "expansion") for t in weights}
    return ExpandedQuery(weights, origin)


def _feedback_documents(
    topic: Topic, corpus: Corpus, qrels: Optional[Sequence[Qrel]]
) -> Optional[list[Document]]:
    if qrels is None:
        return None
    docs = []
    for qrel in qrels:
        if qrel.topic == topic.number and qrel.grade >= 1:
            doc = corpus.get(qrel.doc_id)
            if doc is not None:
                docs.append(doc)
    return docs


def rank_dfr(
    query_tokens: Sequence[str],
    corpus: Corpus,
    index: InvertedIndex,
    c: float = 1.0,
    date_cutoff: Optional[datetime.date] = None,
    top_n: int = 1000,
    facets: Sequence[str] = FACETS,
) -> list[tuple[str, float]]:
    """Plain (unexpanded) DFR InL2 ranking over all facets."""
    weights = _original_model(query_tokens)
    return _rank_weighted(weights, corpus, index, c, date_cutoff, top_n, facets)


def _rank_weighted(
    weights: Mapping[str, float],
    corpus: Corpus,
    index: InvertedIndex,
    c: float,
    date_cutoff: Optional[datetime.date],
    top_n: int,
    facets: Sequence[str] = FACETS,
) -> list[tuple[str, float]]:
    scored = []
    for doc in corpus:
        if date_cutoff is not None and doc.pub_date is not None and doc.pub_date < date_cutoff:
            continue
        pos = index.id_to_pos[doc.doc_id]
        total = sum(index.dfr_inl2_weighted(weights, pos, facet, c) for facet in facets)
        if total > 0.0:
            scored.append((doc.doc_id, total))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:top_n]


def rank_rf(
    topic: Topic,
    corpus: Corpus,
    index: InvertedIndex,
    qrels: Optional[Sequence[Qrel]] = None,
    pseudo_depth: int = 10,
    c: float = 1.0,
    max_terms: int = DEFAULT_MAX_TERMS,
    lam: float = DEFAULT_LAMBDA,
    mu: float = DEFAULT_MU,
    date_cutoff: Optional[datetime.date] = None,
    top_n: int = 1000,
    run_tag: str = "rf",
) -> list[RunEntry]:
    """DFR retrieval with RM3 expansion for one topic.

    Feedback documents are the judged-relevant ones (grades 1 and 2) when
    qrels are given, else the top ``pseudo_depth`` pseudo-relevant DFR
    results. The expanded query is built from all three topic fields.
    """
    query_tokens = tokenize(
        " ".join([topic.query, topic.question, topic.narrative]), index.stopwords
    )
    if not query_tokens:
        return []
    feedback = _feedback_documents(topic, corpus, qrels)
    if feedback is None:
        pseudo = rank_dfr(query_tokens, corpus, index, c, date_cutoff, pseudo_depth)
        feedback = [doc for doc_id, _ in pseudo if (doc := corpus.get(doc_id)) is not None]
    expanded = rm3_expand(query_tokens, feedback, index, max_terms, lam, mu)
    ranked = _rank_weighted(expanded.weights, corpus, index, c, date_cutoff, top_n)
    return [
        RunEntry(topic.number, doc_id, rank, score, run_tag)
        for rank, (doc_id, score) in enumerate(ranked, start=1)
    ]


def dump_expansion(expanded: ExpandedQuery) -> str:
    """Human-readable sidecar listing of an expanded query."""
    lines = [
        f"{term}\t{expanded.weights[term]:.6f}\t{expanded.origin[term]}"
        for term in sorted(expanded.weights, key=lambda t: (-expanded.weights[t], t))
    ]
    return "\n".join(lines) + "\n"
