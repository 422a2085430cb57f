"""Batch exporter producing HYBRIDVEC sentence-embedding files.

Reads a faceted corpus (JSONL or CSV + sidecar fulltext), segments each
facet into sentences, embeds the sentences with a transformer encoder
(cls or mean pooling), and writes the ``HYBRIDVEC 1`` text format that
the hybridrank search toolkit consumes.
"""

from embed_exporter.encoder import EncoderError, TransformerEncoder
from embed_exporter.export import ExporterConfig, ExportError, export_vectors
from embed_exporter.reader import CorpusReadError, FacetedDoc, read_corpus
from embed_exporter.segment import split_sentences
from embed_exporter.writer import write_hybridvec

__all__ = [
    "CorpusReadError",
    "EncoderError",
    "ExportError",
    "ExporterConfig",
    "FacetedDoc",
    "TransformerEncoder",
    "export_vectors",
    "read_corpus",
    "split_sentences",
    "write_hybridvec",
]
