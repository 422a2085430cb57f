"""End-to-end export: corpus -> segmented sentences -> embeddings -> file."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from embed_exporter.encoder import TransformerEncoder
from embed_exporter.reader import FACETS, read_corpus
from embed_exporter.segment import split_sentences
from embed_exporter.writer import write_hybridvec

log = logging.getLogger(__name__)


class ExportError(Exception):
    """The export cannot proceed (for example, an empty corpus)."""


@dataclass(frozen=True)
class ExporterConfig:
    corpus: Path
    model: str
    output: Path
    pooling: str = "cls"
    batch_size: int = 32
    corpus_format: str = "jsonl"
    sidecar_dir: Path | None = None
    device: str = "cpu"
    facet_names: Sequence[str] = field(default=FACETS)


@dataclass(frozen=True)
class ExportStats:
    documents: int
    sentences: int
    dimension: int


def export_vectors(config: ExporterConfig) -> ExportStats:
    """Embed every facet sentence of every corpus document and write the file."""
    docs = read_corpus(config.corpus, config.corpus_format, config.sidecar_dir)
    if not docs:
        raise ExportError(f"{config.corpus}: corpus is empty")
    encoder = TransformerEncoder(
        config.model, pooling=config.pooling, batch_size=config.batch_size, device=config.device
    )
    records = []
    total_sentences = 0
    for doc in docs:
        facets = {}
        for facet in config.facet_names:
            sentences = split_sentences(doc.facet(facet))
            facets[facet] = encoder.encode(sentences)
            total_sentences += len(sentences)
        records.append((doc.doc_id, facets))
    written = write_hybridvec(config.output, encoder.dimension, records, config.facet_names)
    log.info(
        "exported %d documents (%d sentences, dimension %d) -> %s",
        written, total_sentences, encoder.dimension, config.output,
    )
    return ExportStats(written, total_sentences, encoder.dimension)
