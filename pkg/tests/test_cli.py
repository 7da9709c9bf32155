from __future__ import annotations

import csv
import json
from pathlib import Path

from conftest import XTM_ZOO

from tmclust.cli import (
    ExperimentConfig,
    cmd_cluster,
    cmd_evaluate,
    cmd_experiment,
    cmd_ingest,
    cmd_simmatrix,
    main,
)
from tmclust.synth import make_planted_corpus, write_jsonl

TEXT_DOCS = {
    "d1": ("red cars race fast. red wins again.", "racing"),
    "d2": ("red cars race hard. red track wins.", "racing"),
    "d3": ("soup recipe needs onions. soup tastes great.", "cooking"),
    "d4": ("soup recipe wants garlic. soup smells great.", "cooking"),
}


def write_text_corpus(base: Path, docs: dict[str, tuple[str, str]] = TEXT_DOCS) -> Path:
    base.mkdir(parents=True, exist_ok=True)
    rows = ["doc_id,label"]
    for doc_id, (text, label) in docs.items():
        (base / f"{doc_id}.txt").write_text(text, encoding="utf-8")
        rows.append(f"{doc_id},{label}")
    (base / "labels.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    return base


def config_for(tmp_path: Path, corpus: Path, mode: str, **overrides) -> ExperimentConfig:
    values = {
        "corpus": str(corpus),
        "mode": mode,
        "out_dir": str(tmp_path / "out"),
        "dataset": "toy",
    }
    values.update(overrides)
    return ExperimentConfig(**values)


def test_ingest_text_dir_writes_forests_and_vectors(tmp_path):
    corpus = write_text_corpus(tmp_path / "corpus")
    out = cmd_ingest(config_for(tmp_path, corpus, "text-dir"))
    assert sorted(p.stem for p in (out / "forests").glob("*.json")) == [
        "d1", "d2", "d3", "d4",
    ]
    assert (out / "vectors.json").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["doc_ids"] == ["d1", "d2", "d3", "d4"]
    assert manifest["classes"] == ["cooking", "racing"]


def test_ingest_empty_dir_is_a_data_error(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    (empty / "labels.csv").write_text("doc_id,label\n", encoding="utf-8")
    code = main(
        ["ingest", "--corpus", str(empty), "--mode", "text-dir", "--out-dir", str(tmp_path / "out")]
    )
    assert code == 2


def test_ingest_xtm_dir_skips_fallback_builder(tmp_path):
    corpus = tmp_path / "xtms"
    corpus.mkdir()
    (corpus / "zoo.xtm").write_bytes(XTM_ZOO)
    (corpus / "labels.csv").write_text("doc_id,label\nzoo,animals\n", encoding="utf-8")
    out = cmd_ingest(config_for(tmp_path, corpus, "xtm-dir"))
    tree = json.loads((out / "forests" / "zoo.json").read_text())
    # Hierarchy comes from the associations, not from sentence statistics.
    assert [c["label"] for c in tree["children"]] == ["animals"]
    assert [c["label"] for c in tree["children"][0]["children"]] == ["cats", "dogs"]


def test_simmatrix_tm_sim_identical_docs(tmp_path):
    docs = {
        "a": ("red cars race. red wins.", "x"),
        "b": ("red cars race. red wins.", "x"),
    }
    corpus = write_text_corpus(tmp_path / "corpus", docs)
    config = config_for(tmp_path, corpus, "text-dir")
    cmd_ingest(config)
    path = cmd_simmatrix(config, "tm-sim")
    rows = list(csv.reader(path.read_text().splitlines()))
    assert rows[1][1:] == ["1.0", "1.0"]
    assert rows[2][1:] == ["1.0", "1.0"]


def test_simmatrix_cosine_disjoint_docs(tmp_path):
    docs = {
        "a": ("alpha beta gamma", "x"),
        "b": ("delta epsilon zeta", "y"),
    }
    corpus = write_text_corpus(tmp_path / "corpus", docs)
    config = config_for(tmp_path, corpus, "text-dir")
    cmd_ingest(config)
    path = cmd_simmatrix(config, "cosine")
    rows = list(csv.reader(path.read_text().splitlines()))
    assert rows[1][1:] == ["1.0", "0.0"]
    assert rows[2][1:] == ["0.0", "1.0"]


def test_simmatrix_is_byte_identical_across_runs(tmp_path):
    corpus = write_text_corpus(tmp_path / "corpus")
    first_cfg = config_for(tmp_path, corpus, "text-dir", out_dir=str(tmp_path / "out1"))
    second_cfg = config_for(tmp_path, corpus, "text-dir", out_dir=str(tmp_path / "out2"))
    for config in (first_cfg, second_cfg):
        cmd_ingest(config)
        for measure in ("cosine", "tm-sim", "kld"):
            cmd_simmatrix(config, measure)
    for name in ("matrix_cosine.csv", "matrix_tm-sim.csv", "matrix_kld.csv", "vectors.json"):
        assert (tmp_path / "out1" / name).read_bytes() == (tmp_path / "out2" / name).read_bytes()


def test_cluster_and_evaluate_stage_chain(tmp_path):
    corpus = write_text_corpus(tmp_path / "corpus")
    config = config_for(tmp_path, corpus, "text-dir")
    cmd_ingest(config)
    cmd_simmatrix(config, "tm-sim")
    assignment_path = cmd_cluster(config, "tm-sim")
    rows = list(csv.reader(assignment_path.read_text().splitlines()))
    assert rows[0] == ["doc_id", "cluster"]
    assert len(rows) == 5
    report = cmd_evaluate(config, "tm-sim")
    # k defaults to the gold class count.
    assert report.k == 2
    assert (Path(config.out_dir) / "eval_tm-sim.json").exists()


def test_experiment_writes_report_and_config_echo(tmp_path):
    corpus = write_text_corpus(tmp_path / "corpus")
    config = config_for(tmp_path, corpus, "text-dir")
    report_path = cmd_experiment(config)
    rows = list(csv.reader(report_path.read_text().splitlines()))
    assert rows[0] == ["dataset", "measure", "linkage", "k", "purity", "entropy", "seconds"]
    assert len(rows) == 6
    assert [row[1] for row in rows[1:]] == [
        "euclidean", "cosine", "jaccard", "kld", "tm-sim",
    ]
    echo = json.loads((Path(config.out_dir) / "run_config.json").read_text())
    assert echo["corpus"] == str(corpus)
    assert echo["measures"] == list(config.measures)


def test_experiment_jsonl_with_trees(tmp_path):
    path = write_jsonl(
        make_planted_corpus(n_clusters=2, docs_per_cluster=4, seed=7),
        tmp_path / "planted.jsonl",
    )
    config = ExperimentConfig(
        corpus=str(path),
        mode="jsonl",
        out_dir=str(tmp_path / "out"),
        dataset="planted-small",
        measures=["cosine", "tm-sim"],
    )
    report_path = cmd_experiment(config)
    rows = list(csv.reader(report_path.read_text().splitlines()))
    assert len(rows) == 3
    by_measure = {row[1]: row for row in rows[1:]}
    assert float(by_measure["tm-sim"][4]) == 1.0


def test_cli_exit_codes(tmp_path):
    corpus = write_text_corpus(tmp_path / "corpus")
    out_dir = str(tmp_path / "out")
    ok = main(["ingest", "--corpus", str(corpus), "--mode", "text-dir", "--out-dir", out_dir])
    assert ok == 0
    usage = main(["simmatrix", "--measure", "bogus", "--corpus", str(corpus), "--out-dir", out_dir])
    assert usage == 1
    missing = main(
        ["ingest", "--corpus", str(tmp_path / "nowhere"), "--mode", "text-dir", "--out-dir", out_dir]
    )
    assert missing == 2


def test_cli_config_file_with_flag_override(tmp_path):
    corpus = write_text_corpus(tmp_path / "corpus")
    config_path = tmp_path / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "corpus": str(corpus),
                "mode": "text-dir",
                "out_dir": str(tmp_path / "from_file"),
                "measures": ["cosine"],
                "dataset": "toy",
            }
        ),
        encoding="utf-8",
    )
    code = main(
        ["experiment", "--config", str(config_path), "--out-dir", str(tmp_path / "override")]
    )
    assert code == 0
    assert (tmp_path / "override" / "report.csv").exists()
    assert not (tmp_path / "from_file").exists()


def test_cli_rejects_unknown_config_key(tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"corpus": "x", "bogus": 1}), encoding="utf-8")
    assert main(["ingest", "--config", str(config_path)]) == 1


def test_cli_requires_corpus():
    assert main(["ingest"]) == 1
