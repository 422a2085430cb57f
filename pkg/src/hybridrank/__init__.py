"""Hybrid search toolkit: BM25 inverted index + per-facet embedding vectors.

Provides corpus ingestion, a faceted inverted index with BM25 and DFR InL2
scoring, a brute-force cosine vector index, the combined lexical+neural
ranker with log-z calibration, RM3 relevance feedback, reciprocal-rank
fusion, TREC file I/O, and graded-relevance evaluation metrics.
"""

from hybridrank.corpus import Corpus, Document, filter_by_date, load_corpus
from hybridrank.invindex import Bm25Params, InvertedIndex, build_index
from hybridrank.ranker import fuse_runs, rank_nir, rerank_nirr
from hybridrank.trec import Qrel, RunEntry, Topic, parse_qrels, parse_topics, read_run, write_run
from hybridrank.vectors import HashEmbedder, VectorIndex, build_vector_index, cosine, load_vectors

__all__ = [
    "Bm25Params",
    "Corpus",
    "Document",
    "HashEmbedder",
    "InvertedIndex",
    "Qrel",
    "RunEntry",
    "Topic",
    "VectorIndex",
    "build_index",
    "build_vector_index",
    "cosine",
    "filter_by_date",
    "fuse_runs",
    "load_corpus",
    "load_vectors",
    "parse_qrels",
    "parse_topics",
    "rank_nir",
    "read_run",
    "rerank_nirr",
    "write_run",
]

__version__ = "0.1.0"
