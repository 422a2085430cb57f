"""Experiment configuration: a small `key = value` file plus CLI overrides.

Format: one `key = value` per line, `#` comments and blank lines allowed.
Unknown keys are fatal (catches typos before an hour-long run does).

Keys (all optional unless noted):
  corpus           path to the corpus file (required for index/search/ablate)
  corpus_format    jsonl | csv-metadata        (default jsonl)
  sidecar_dir      fulltext directory for csv-metadata
  stopwords        stopword file path (default: built-in list)
  embedder         hash:<dimension>:<seed>     (built-in test embedder)
  vectors          HYBRIDVEC vector file produced by an exporter
  topic_vectors    HYBRIDVEC file of topic-field vectors (vector-file mode)
  mode             nir | nirr | bm25-only | neural-only | dfr-rf  (default nir)
  drop_title, drop_abstract, drop_fulltext, drop_neural, drop_bm25,
  drop_filter      true/false ablation switches (nir/nirr modes only)
  date_cutoff      ISO date; documents dated earlier are dropped
  depth            NIRR rerank depth           (default 50)
  k_rrf            reciprocal-rank-fusion constant (default 60)
  bm25_k1, bm25_b  BM25 parameters             (defaults 1.2, 0.75)
  candidate_mode   exhaustive | bm25-topk      (default exhaustive)
  candidate_k      per-facet candidate pool for bm25-topk (default 1000)
  top_n            run depth per topic         (default 1000)
  run_tag          tag prefix; a config hash is appended for traceability
  rf_lambda, rf_max_terms, rf_mu, rf_pseudo_depth, dfr_c
                   relevance-feedback parameters (defaults 0.4, 50, 2000, 10, 1)
"""

from __future__ import annotations

import datetime
import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from hybridrank.corpus import FACETS
from hybridrank.invindex import Bm25Params
from hybridrank.ranker import RankConfig

MODES = ("nir", "nirr", "bm25-only", "neural-only", "dfr-rf")

_BOOL_KEYS = ("drop_title", "drop_abstract", "drop_fulltext", "drop_neural", "drop_bm25", "drop_filter")


class ConfigError(Exception):
    """Invalid configuration file or flag combination."""


@dataclass
class ExperimentConfig:
    corpus: Optional[Path] = None
    corpus_format: str = "jsonl"
    sidecar_dir: Optional[Path] = None
    stopwords: Optional[Path] = None
    embedder: Optional[str] = None
    vectors: Optional[Path] = None
    topic_vectors: Optional[Path] = None
    mode: str = "nir"
    drops: set[str] = field(default_factory=set)
    date_cutoff: Optional[datetime.date] = None
    depth: int = 50
    k_rrf: float = 60.0
    bm25_k1: float = 1.2
    bm25_b: float = 0.75
    candidate_mode: str = "exhaustive"
    candidate_k: int = 1000
    top_n: int = 1000
    run_tag: str = "run"
    rf_lambda: float = 0.4
    rf_max_terms: int = 50
    rf_mu: float = 2000.0
    rf_pseudo_depth: int = 10
    dfr_c: float = 1.0

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.drops and self.mode not in ("nir", "nirr"):
            raise ConfigError("ablation switches are only valid for nir/nirr modes")
        if self.corpus_format not in ("jsonl", "csv-metadata"):
            raise ConfigError(f"unknown corpus format {self.corpus_format!r}")
        if self.embedder is not None:
            parse_embedder_spec(self.embedder)

    def rank_config(self) -> RankConfig:
        facets = tuple(f for f in FACETS if f"drop_{f}" not in self.drops)
        return RankConfig(
            bm25=Bm25Params(self.bm25_k1, self.bm25_b),
            facets=facets,
            use_bm25="drop_bm25" not in self.drops and self.mode != "neural-only",
            use_neural="drop_neural" not in self.drops and self.mode != "bm25-only",
            date_cutoff=None if "drop_filter" in self.drops else self.date_cutoff,
            top_n=self.top_n,
            rerank_depth=self.depth,
            k_rrf=self.k_rrf,
            candidate_mode=self.candidate_mode,
            candidate_k=self.candidate_k,
            run_tag=self.tag(),
        )

    def canonical(self) -> str:
        """Stable textual form used for the traceability hash."""
        parts = []
        for key in sorted(vars(self)):
            value = getattr(self, key)
            if isinstance(value, set):
                value = ",".join(sorted(value))
            parts.append(f"{key}={value}")
        return ";".join(parts)

    def tag(self) -> str:
        digest = hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()[:8]
        return f"{self.run_tag}-{digest}"


def parse_embedder_spec(spec: str) -> tuple[int, int]:
    """Parse `hash:<dimension>:<seed>` into (dimension, seed)."""
    parts = spec.split(":")
    if len(parts) != 3 or parts[0] != "hash":
        raise ConfigError(f"embedder spec must be hash:<dimension>:<seed>, got {spec!r}")
    try:
        dim, seed = int(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"non-integer embedder dimension/seed in {spec!r}") from exc
    if dim < 1:
        raise ConfigError("embedder dimension must be >= 1")
    return dim, seed


def load_config(path: str | Path) -> ExperimentConfig:
    cfg = ExperimentConfig()
    path = Path(path)
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        try:
            _apply(cfg, key, value)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    cfg.validate()
    return cfg


def _apply(cfg: ExperimentConfig, key: str, value: str) -> None:
    if key in _BOOL_KEYS:
        if value.lower() not in ("true", "false"):
            raise ConfigError(f"{key} must be true or false")
        if value.lower() == "true":
            cfg.drops.add(key)
        else:
            cfg.drops.discard(key)
    elif key in ("corpus", "sidecar_dir", "stopwords", "vectors", "topic_vectors"):
        setattr(cfg, key, Path(value))
    elif key == "date_cutoff":
        cfg.date_cutoff = datetime.date.fromisoformat(value) if value else None
    elif key in ("depth", "candidate_k", "top_n", "rf_max_terms", "rf_pseudo_depth"):
        setattr(cfg, key, int(value))
    elif key in ("k_rrf", "bm25_k1", "bm25_b", "rf_lambda", "rf_mu", "dfr_c"):
        setattr(cfg, key, float(value))
    elif key in ("corpus_format", "embedder", "mode", "candidate_mode", "run_tag"):
        setattr(cfg, key, value)
    else:
        raise ConfigError(f"unknown config key {key!r}")
