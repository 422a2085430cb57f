"""Command-line interface: index, search, eval, ablate, fuse.

Every command is deterministic given fixed config, inputs, and seed; run
tags embed a config hash so any run file traces back to its settings.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from hybridrank import evalmetrics, report
from hybridrank.config import ConfigError, ExperimentConfig, load_config, parse_embedder_spec
from hybridrank.corpus import Corpus, CorpusError, load_corpus
from hybridrank.feedback import rank_rf
from hybridrank.invindex import IndexFormatError, InvertedIndex, build_index
from hybridrank.ranker import RankConfig, fuse_runs, rank_nir, rerank_nirr, topic_field_vectors
from hybridrank.textproc import DEFAULT_STOPWORDS, load_stopwords
from hybridrank.trec import (
    TOPIC_FIELDS,
    Topic,
    TrecFormatError,
    parse_qrels,
    parse_topics,
    read_run,
    write_run,
)
from hybridrank.vectors import (
    HashEmbedder,
    VectorFormatError,
    VectorIndex,
    build_vector_index,
    load_vectors,
    save_vectors,
)

log = logging.getLogger("hybridrank")

INDEX_FILE = "index.bin"
VECTOR_FILE = "vectors.hv"
MANIFEST_FILE = "manifest.json"

ABLATION_SWITCHES = ("neural", "bm25", "title", "abstract", "fulltext", "filter")


class UsageError(Exception):
    pass


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _load_corpus(cfg: ExperimentConfig) -> Corpus:
    if cfg.corpus is None:
        raise UsageError("config must set a corpus path")
    return load_corpus(cfg.corpus, cfg.corpus_format, cfg.sidecar_dir)


def _stopwords(cfg: ExperimentConfig) -> frozenset[str]:
    return load_stopwords(cfg.stopwords) if cfg.stopwords else DEFAULT_STOPWORDS


def _provider(cfg: ExperimentConfig) -> Optional[HashEmbedder]:
    if cfg.embedder is None:
        return None
    dim, seed = parse_embedder_spec(cfg.embedder)
    return HashEmbedder(dim, seed)


def cmd_index(cfg: ExperimentConfig, out_dir: Path) -> None:
    corpus = _load_corpus(cfg)
    out_dir.mkdir(parents=True, exist_ok=True)
    stopwords = _stopwords(cfg)
    index = build_index(corpus, stopwords)
    index.save(out_dir / INDEX_FILE)

    dimension = None
    if cfg.embedder is not None:
        provider = _provider(cfg)
        vec_index = build_vector_index(corpus, provider)
        save_vectors(vec_index, out_dir / VECTOR_FILE)
        dimension = provider.dimension
    elif cfg.vectors is not None:
        vec_index = load_vectors(cfg.vectors, corpus)
        save_vectors(vec_index, out_dir / VECTOR_FILE)
        dimension = vec_index.dimension

    manifest = {
        "corpus": str(cfg.corpus),
        "corpus_sha256": _sha256_file(cfg.corpus),
        "corpus_format": cfg.corpus_format,
        "doc_count": len(corpus),
        "dimension": dimension,
        "embedder": cfg.embedder,
        "tokenizer": "lowercase-alnum",
        "stopword_count": len(stopwords),
        "index_version": 1,
    }
    (out_dir / MANIFEST_FILE).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"indexed {len(corpus)} documents -> {out_dir}")


def _load_indexes(cfg: ExperimentConfig, index_dir: Path, corpus: Corpus):
    manifest_path = index_dir / MANIFEST_FILE
    if not manifest_path.is_file():
        raise UsageError(f"no index manifest at {manifest_path}; run `hybridrank index` first")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    index = InvertedIndex.load(index_dir / INDEX_FILE)
    vec_index = None
    vec_path = index_dir / VECTOR_FILE
    if vec_path.is_file():
        vec_index = load_vectors(vec_path, corpus, expected_dim=manifest.get("dimension"))
    return index, vec_index


def _topic_vectors_for(
    cfg: ExperimentConfig, topic: Topic, provider, topic_vec_index: Optional[VectorIndex]
):
    if topic_vec_index is not None:
        fv = topic_vec_index.get(str(topic.number))
        if fv is None:
            raise VectorFormatError(f"topic vector file has no record for topic {topic.number}")
        return {name: fv.facet_vector(name) for name in TOPIC_FIELDS}
    if provider is not None:
        return topic_field_vectors(topic, provider)
    return None


def _search_topics(
    cfg: ExperimentConfig,
    rank_cfg: RankConfig,
    topics: Sequence[Topic],
    corpus: Corpus,
    index: InvertedIndex,
    vec_index: Optional[VectorIndex],
    qrels=None,
):
    provider = _provider(cfg)
    topic_vec_index = None
    if cfg.topic_vectors is not None:
        topic_vec_index = load_vectors(cfg.topic_vectors, facet_names=TOPIC_FIELDS)
    if rank_cfg.use_neural and cfg.mode in ("nir", "nirr", "neural-only"):
        if provider is None and topic_vec_index is None:
            raise UsageError(
                "neural scoring needs an `embedder` spec or a `topic_vectors` file for topic fields"
            )

    entries = []
    for topic in sorted(topics, key=lambda t: t.number):
        if cfg.mode == "dfr-rf":
            entries.extend(
                rank_rf(
                    topic, corpus, index, qrels,
                    pseudo_depth=cfg.rf_pseudo_depth, c=cfg.dfr_c,
                    max_terms=cfg.rf_max_terms, lam=cfg.rf_lambda, mu=cfg.rf_mu,
                    date_cutoff=cfg.date_cutoff, top_n=cfg.top_n, run_tag=rank_cfg.run_tag,
                )
            )
            continue
        field_vectors = (
            _topic_vectors_for(cfg, topic, provider, topic_vec_index)
            if rank_cfg.use_neural else None
        )
        run = rank_nir(topic, corpus, index, vec_index, config=rank_cfg, field_vectors=field_vectors)
        if cfg.mode == "nirr" and vec_index is not None and field_vectors is not None:
            run = rerank_nirr(run, rank_cfg.rerank_depth, field_vectors, vec_index, rank_cfg.run_tag)
        entries.extend(run)
    return entries


def cmd_search(cfg: ExperimentConfig, index_dir: Path, topics_path: Path, out_path: Path, qrels_path: Optional[Path]) -> None:
    corpus = _load_corpus(cfg)
    index, vec_index = _load_indexes(cfg, index_dir, corpus)
    topics = parse_topics(topics_path)
    qrels = parse_qrels(qrels_path) if qrels_path else None
    entries = _search_topics(cfg, cfg.rank_config(), topics, corpus, index, vec_index, qrels)
    write_run(entries, out_path)
    print(f"wrote {len(entries)} run entries for {len(topics)} topics -> {out_path}")


def cmd_eval(run_paths: Sequence[Path], qrels_path: Path, out_dir: Path, figures: bool) -> None:
    if not 1 <= len(run_paths) <= 2:
        raise UsageError("eval takes one or two --run files")
    qrels = parse_qrels(qrels_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    all_scores = []
    for label, run_path in zip("ab", run_paths):
        run = read_run(run_path)
        per_topic, macro = evalmetrics.evaluate_run(run, qrels)
        all_scores.append(per_topic)
        (out_dir / f"eval_{label}.csv").write_text(
            evalmetrics.scores_to_csv(per_topic, macro), encoding="utf-8"
        )
        (out_dir / f"eval_{label}.txt").write_text(
            evalmetrics.scores_to_table(per_topic, macro), encoding="utf-8"
        )
        if figures:
            report.plot_topic_metrics(per_topic, out_dir / f"metrics_{label}.png", run_path.name)
        print(f"{run_path.name}: ndcg10={macro.ndcg10:.4f} p5={macro.p5:.4f} "
              f"map={macro.ap:.4f} bpref={macro.bpref:.4f}")
    if len(run_paths) == 2:
        rows = evalmetrics.compare_runs(all_scores[0], all_scores[1])
        (out_dir / "comparison.csv").write_text(evalmetrics.comparison_to_csv(rows), encoding="utf-8")
        if figures:
            report.plot_run_comparison(
                all_scores[0], all_scores[1], out_dir / "comparison.png",
                run_paths[0].name, run_paths[1].name,
            )


def cmd_ablate(cfg: ExperimentConfig, index_dir: Path, topics_path: Path, qrels_path: Path, out_dir: Path, figures: bool) -> None:
    if cfg.mode not in ("nir", "nirr"):
        raise UsageError("ablate requires nir or nirr mode")
    corpus = _load_corpus(cfg)
    index, vec_index = _load_indexes(cfg, index_dir, corpus)
    topics = parse_topics(topics_path)
    qrels = parse_qrels(qrels_path)
    out_dir.mkdir(parents=True, exist_ok=True)

    base_cfg = cfg.rank_config()
    variants = [("full", base_cfg)]
    variants += [(f"-{s}", base_cfg.without(s)) for s in ABLATION_SWITCHES]

    rows = []
    for name, rank_cfg in variants:
        entries = _search_topics(cfg, rank_cfg, topics, corpus, index, vec_index)
        _, macro = evalmetrics.evaluate_run(entries, qrels)
        rows.append((name, macro.p5, macro.ndcg10))
    lines = ["variant,p5,ndcg10"]
    lines += [f"{name},{p5:.4f},{ndcg:.4f}" for name, p5, ndcg in rows]
    (out_dir / "ablation.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if figures:
        report.plot_ablation(rows, out_dir / "ablation.png")
    for name, p5, ndcg in rows:
        print(f"{name:>10}  p5={p5:.4f}  ndcg10={ndcg:.4f}")


def cmd_fuse(run_paths: Sequence[Path], k_rrf: float, out_path: Path, run_tag: str) -> None:
    if len(run_paths) < 2:
        raise UsageError("fuse needs at least two --run files")
    runs = [read_run(p) for p in run_paths]
    fused = fuse_runs(runs, k_rrf, run_tag)
    write_run(fused, out_path)
    print(f"fused {len(run_paths)} runs -> {out_path}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridrank", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", type=Path, required=True, help="experiment config file")
        p.add_argument("--mode", help="override the config's scorer mode")
        p.add_argument("--seed", type=int, help="override the hash embedder seed")

    p_index = sub.add_parser("index", help="build and persist both indexes")
    add_config(p_index)
    p_index.add_argument("--out", type=Path, required=True, help="index output directory")

    p_search = sub.add_parser("search", help="rank topics into a TREC run file")
    add_config(p_search)
    p_search.add_argument("--index-dir", type=Path, required=True)
    p_search.add_argument("--topics", type=Path, required=True)
    p_search.add_argument("--qrels", type=Path, help="judgements for dfr-rf feedback")
    p_search.add_argument("--out", type=Path, required=True)

    p_eval = sub.add_parser("eval", help="evaluate one or two run files")
    p_eval.add_argument("--run", type=Path, action="append", required=True)
    p_eval.add_argument("--qrels", type=Path, required=True)
    p_eval.add_argument("--out", type=Path, required=True, help="report output directory")
    p_eval.add_argument("--no-figures", action="store_true")

    p_ablate = sub.add_parser("ablate", help="run the single-switch ablation table")
    add_config(p_ablate)
    p_ablate.add_argument("--index-dir", type=Path, required=True)
    p_ablate.add_argument("--topics", type=Path, required=True)
    p_ablate.add_argument("--qrels", type=Path, required=True)
    p_ablate.add_argument("--out", type=Path, required=True)
    p_ablate.add_argument("--no-figures", action="store_true")

    p_fuse = sub.add_parser("fuse", help="reciprocal-rank fuse two or more runs")
    p_fuse.add_argument("--run", type=Path, action="append", required=True)
    p_fuse.add_argument("--k-rrf", type=float, default=60.0)
    p_fuse.add_argument("--run-tag", default="fusion")
    p_fuse.add_argument("--out", type=Path, required=True)

    return parser


def _config_from_args(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    if args.mode:
        cfg.mode = args.mode
    if args.seed is not None:
        if cfg.embedder is None:
            raise UsageError("--seed given but the config has no embedder spec")
        dim, _ = parse_embedder_spec(cfg.embedder)
        cfg.embedder = f"hash:{dim}:{args.seed}"
    cfg.validate()
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        if args.command == "index":
            cmd_index(_config_from_args(args), args.out)
        elif args.command == "search":
            cmd_search(_config_from_args(args), args.index_dir, args.topics, args.out, args.qrels)
        elif args.command == "eval":
            cmd_eval(args.run, args.qrels, args.out, not args.no_figures)
        elif args.command == "ablate":
            cmd_ablate(_config_from_args(args), args.index_dir, args.topics, args.qrels, args.out, not args.no_figures)
        elif args.command == "fuse":
            cmd_fuse(args.run, args.k_rrf, args.out, args.run_tag)
        return 0
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CorpusError, TrecFormatError, VectorFormatError, IndexFormatError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
