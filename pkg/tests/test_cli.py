import json

import pytest

from hybridrank.cli import main
from hybridrank.config import ConfigError, load_config
from hybridrank.trec import read_run

from fixtures import synth_corpus, write_jsonl, write_qrels, write_topics_xml


@pytest.fixture
def workspace(tmp_path):
    records, topics, qrels = synth_corpus(20, seed=4, n_topics=3)
    write_jsonl(records, tmp_path / "corpus.jsonl")
    write_topics_xml(topics, tmp_path / "topics.xml")
    write_qrels(qrels, tmp_path / "qrels.txt")
    (tmp_path / "config.txt").write_text(
        f"corpus = {tmp_path / 'corpus.jsonl'}\n"
        "embedder = hash:16:7\n"
        "mode = nir\n"
        "date_cutoff = 2019-12-31\n"
        "top_n = 100\n"
        "run_tag = test\n",
        encoding="utf-8",
    )
    return tmp_path


def run_cli(*args):
    return main([str(a) for a in args])


def test_config_parsing(workspace):
    cfg = load_config(workspace / "config.txt")
    assert cfg.mode == "nir" and cfg.embedder == "hash:16:7"
    assert cfg.date_cutoff is not None
    assert cfg.tag().startswith("test-")


def test_config_unknown_key(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("no_such_key = 1\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="no_such_key"):
        load_config(path)


def test_config_ablation_only_for_nir(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("mode = dfr-rf\ndrop_title = true\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="ablation"):
        load_config(path)


def test_index_creates_manifest(workspace, capsys):
    assert run_cli("index", "--config", workspace / "config.txt", "--out", workspace / "idx") == 0
    manifest = json.loads((workspace / "idx" / "manifest.json").read_text())
    assert manifest["doc_count"] == 20
    assert manifest["dimension"] == 16
    assert (workspace / "idx" / "index.bin").is_file()
    assert (workspace / "idx" / "vectors.hv").is_file()


def test_reindex_byte_identical(workspace):
    run_cli("index", "--config", workspace / "config.txt", "--out", workspace / "idx1")
    run_cli("index", "--config", workspace / "config.txt", "--out", workspace / "idx2")
    for name in ("index.bin", "vectors.hv", "manifest.json"):
        assert (workspace / "idx1" / name).read_bytes() == (workspace / "idx2" / name).read_bytes()


def test_search_and_eval_pipeline(workspace):
    assert run_cli("index", "--config", workspace / "config.txt", "--out", workspace / "idx") == 0
    assert run_cli(
        "search", "--config", workspace / "config.txt", "--index-dir", workspace / "idx",
        "--topics", workspace / "topics.xml", "--out", workspace / "nir.run",
    ) == 0
    entries = read_run(workspace / "nir.run")
    assert entries and all(e.run_tag.startswith("test-") for e in entries)
    assert run_cli(
        "eval", "--run", workspace / "nir.run", "--qrels", workspace / "qrels.txt",
        "--out", workspace / "report",
    ) == 0
    csv_text = (workspace / "report" / "eval_a.csv").read_text()
    assert csv_text.splitlines()[0] == "topic,ndcg10,p5,ap,bpref,judged_at_10"
    assert (workspace / "report" / "metrics_a.png").is_file()


def test_search_deterministic(workspace):
    run_cli("index", "--config", workspace / "config.txt", "--out", workspace / "idx")
    for name in ("a.run", "b.run"):
        run_cli("search", "--config", workspace / "config.txt", "--index-dir", workspace / "idx",
                "--topics", workspace / "topics.xml", "--out", workspace / name)
    assert (workspace / "a.run").read_bytes() == (workspace / "b.run").read_bytes()


def test_nirr_depth_zero_matches_nir(workspace):
    run_cli("index", "--config", workspace / "config.txt", "--out", workspace / "idx")
    cfg2 = (workspace / "config.txt").read_text() + "depth = 0\nmode = nirr\n"
    (workspace / "config2.txt").write_text(cfg2, encoding="utf-8")
    run_cli("search", "--config", workspace / "config.txt", "--index-dir", workspace / "idx",
            "--topics", workspace / "topics.xml", "--out", workspace / "nir.run")
    run_cli("search", "--config", workspace / "config2.txt", "--index-dir", workspace / "idx",
            "--topics", workspace / "topics.xml", "--out", workspace / "nirr0.run")
    nir = [(e.topic, e.doc_id, e.rank) for e in read_run(workspace / "nir.run")]
    nirr = [(e.topic, e.doc_id, e.rank) for e in read_run(workspace / "nirr0.run")]
    assert nir == nirr


def test_bm25_only_mode(workspace):
    run_cli("index", "--config", workspace / "config.txt", "--out", workspace / "idx")
    assert run_cli(
        "search", "--config", workspace / "config.txt", "--mode", "bm25-only",
        "--index-dir", workspace / "idx",
        "--topics", workspace / "topics.xml", "--out", workspace / "bm25.run",
    ) == 0
    assert read_run(workspace / "bm25.run")


def test_dfr_rf_mode_with_qrels(workspace):
    run_cli("index", "--config", workspace / "config.txt", "--out", workspace / "idx")
    assert run_cli(
        "search", "--config", workspace / "config.txt", "--mode", "dfr-rf",
        "--index-dir", workspace / "idx",
        "--topics", workspace / "topics.xml", "--qrels", workspace / "qrels.txt",
        "--out", workspace / "rf.run",
    ) == 0
    assert read_run(workspace / "rf.run")


def test_fuse_command(workspace):
    run_cli("index", "--config", workspace / "config.txt", "--out", workspace / "idx")
    run_cli("search", "--config", workspace / "config.txt", "--index-dir", workspace / "idx",
            "--topics", workspace / "topics.xml", "--out", workspace / "a.run")
    run_cli("search", "--config", workspace / "config.txt", "--mode", "bm25-only",
            "--index-dir", workspace / "idx",
            "--topics", workspace / "topics.xml", "--out", workspace / "b.run")
    assert run_cli("fuse", "--run", workspace / "a.run", "--run", workspace / "b.run",
                   "--out", workspace / "fused.run") == 0
    fused = read_run(workspace / "fused.run")
    assert fused and all(e.run_tag == "fusion" for e in fused)


def test_ablate_emits_seven_rows(workspace):
    run_cli("index", "--config", workspace / "config.txt", "--out", workspace / "idx")
    assert run_cli(
        "ablate", "--config", workspace / "config.txt", "--index-dir", workspace / "idx",
        "--topics", workspace / "topics.xml", "--qrels", workspace / "qrels.txt",
        "--out", workspace / "ablation", "--no-figures",
    ) == 0
    lines = (workspace / "ablation" / "ablation.csv").read_text().strip().splitlines()
    assert lines[0] == "variant,p5,ndcg10"
    assert len(lines) == 8  # header + full + 6 ablations
    names = [line.split(",")[0] for line in lines[1:]]
    assert names == ["full", "-neural", "-bm25", "-title", "-abstract", "-fulltext", "-filter"]


def test_eval_two_runs_comparison(workspace):
    run_cli("index", "--config", workspace / "config.txt", "--out", workspace / "idx")
    run_cli("search", "--config", workspace / "config.txt", "--index-dir", workspace / "idx",
            "--topics", workspace / "topics.xml", "--out", workspace / "a.run")
    run_cli("search", "--config", workspace / "config.txt", "--mode", "bm25-only",
            "--index-dir", workspace / "idx",
            "--topics", workspace / "topics.xml", "--out", workspace / "b.run")
    assert run_cli("eval", "--run", workspace / "a.run", "--run", workspace / "b.run",
                   "--qrels", workspace / "qrels.txt", "--out", workspace / "cmp") == 0
    assert (workspace / "cmp" / "comparison.csv").is_file()
    assert (workspace / "cmp" / "comparison.png").is_file()


def test_missing_manifest_is_usage_error(workspace, capsys):
    code = run_cli("search", "--config", workspace / "config.txt",
                   "--index-dir", workspace / "nosuch",
                   "--topics", workspace / "topics.xml", "--out", workspace / "x.run")
    assert code == 1
    assert "manifest" in capsys.readouterr().err


def test_vector_dimension_mismatch_is_data_error(workspace, capsys):
    run_cli("index", "--config", workspace / "config.txt", "--out", workspace / "idx")
    manifest = json.loads((workspace / "idx" / "manifest.json").read_text())
    manifest["dimension"] = 768
    (workspace / "idx" / "manifest.json").write_text(json.dumps(manifest), encoding="utf-8")
    code = run_cli("search", "--config", workspace / "config.txt", "--index-dir", workspace / "idx",
                   "--topics", workspace / "topics.xml", "--out", workspace / "x.run")
    assert code == 2
    assert "dimension" in capsys.readouterr().err


def test_bad_qrels_is_data_error(workspace, capsys):
    (workspace / "bad_qrels.txt").write_text("1 0 doc 9\n", encoding="utf-8")
    code = run_cli("eval", "--run", workspace / "nope.run",
                   "--qrels", workspace / "bad_qrels.txt", "--out", workspace / "r")
    assert code == 2


def test_usage_error_exit_code():
    assert run_cli("nonsense-command") == 1


def test_seed_override_changes_run(workspace):
    run_cli("index", "--config", workspace / "config.txt", "--out", workspace / "idx")
    code = run_cli("search", "--config", workspace / "config.txt", "--seed", "99",
                   "--index-dir", workspace / "idx",
                   "--topics", workspace / "topics.xml", "--out", workspace / "s99.run")
    assert code == 0
