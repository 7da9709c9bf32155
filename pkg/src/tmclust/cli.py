"""Command-line pipeline: ingest, simmatrix, cluster, evaluate, experiment.

Every stage reads and writes plain JSON/CSV artifacts in the output
directory, so stages can be run separately or end to end.  Outputs are
byte-identical across runs given the same inputs and seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import cluster as _cluster
from . import evalx, simbase, textpipe, treesim, xtm
from .errors import TmclustError, ValidationError

MEASURE_CHOICES = ("euclidean", "cosine", "jaccard", "kld", "tm-sim")
MODE_CHOICES = ("xtm-dir", "text-dir", "jsonl")
REPORT_COLUMNS = ("dataset", "measure", "linkage", "k", "purity", "entropy", "seconds")


class UsageError(Exception):
    """Bad flags or config; exits with status 1."""


@dataclass
class ExperimentConfig:
    corpus: str = ""
    mode: str = "text-dir"
    measures: list[str] = field(default_factory=lambda: list(MEASURE_CHOICES))
    linkage: str = "average"
    k: int | None = None
    out_dir: str = "out"
    seed: int = 0
    dataset: str = ""
    stopwords: str | None = None
    stem: bool = False
    timing: bool = False

    def validate(self) -> None:
        if not self.corpus:
            raise UsageError("a corpus path is required (flag --corpus or config)")
        if self.mode not in MODE_CHOICES:
            raise UsageError(f"mode must be one of {MODE_CHOICES}, got {self.mode!r}")
        if not self.measures:
            raise UsageError("measures must be non-empty")
        for measure in self.measures:
            if measure not in MEASURE_CHOICES:
                raise UsageError(f"unknown measure {measure!r}")
        if self.linkage not in _cluster.LINKAGES:
            raise UsageError(f"linkage must be one of {_cluster.LINKAGES}")
        if self.k is not None and self.k < 1:
            raise UsageError("k must be >= 1")

    def to_json(self) -> dict:
        return {
            "corpus": self.corpus,
            "mode": self.mode,
            "measures": list(self.measures),
            "linkage": self.linkage,
            "k": self.k,
            "out_dir": self.out_dir,
            "seed": self.seed,
            "dataset": self.dataset,
            "stopwords": self.stopwords,
            "stem": self.stem,
            "timing": self.timing,
        }


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise UsageError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad config JSON in {path}: {exc}") from exc
        known = {f.name for f in fields(ExperimentConfig)}
        for key, value in loaded.items():
            if key not in known:
                raise UsageError(f"unknown config key {key!r}")
            values[key] = value
    for name in (
        "corpus", "mode", "linkage", "k", "out_dir", "seed",
        "dataset", "stopwords",
    ):
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    if getattr(args, "measures", None) is not None:
        values["measures"] = [m.strip() for m in args.measures.split(",") if m.strip()]
    if getattr(args, "stem", False):
        values["stem"] = True
    if getattr(args, "timing", False):
        values["timing"] = True
    config = ExperimentConfig(**values)
    if not config.dataset:
        config.dataset = Path(config.corpus).stem if config.corpus else ""
    config.validate()
    return config


def _stopword_set(config: ExperimentConfig) -> frozenset[str] | None:
    if config.stopwords is None:
        return None
    return textpipe.load_stopwords(config.stopwords)


def _load_corpus(config: ExperimentConfig) -> tuple[textpipe.Corpus, dict[str, xtm.TopicForest]]:
    base = Path(config.corpus)
    if not base.exists():
        raise ValidationError(f"corpus path not found: {base}")
    if config.mode == "jsonl":
        return textpipe.load_jsonl(base, name=config.dataset)
    if config.mode == "text-dir":
        return textpipe.load_text_dir(base, name=config.dataset), {}
    return _load_xtm_dir(base, config)


def _load_xtm_dir(
    base: Path, config: ExperimentConfig
) -> tuple[textpipe.Corpus, dict[str, xtm.TopicForest]]:
    labels = textpipe.read_labels(base / "labels.csv")
    docs = []
    trees: dict[str, xtm.TopicForest] = {}
    for path in sorted(base.glob("*.xtm")):
        doc_id = path.stem
        if doc_id not in labels:
            raise ValidationError(f"document {doc_id!r} missing from labels.csv")
        parsed = xtm.parse_xtm(path.read_bytes(), doc_id=doc_id)
        trees[doc_id] = xtm.derive_forest(parsed)
        # Vector text for XTM input: topic names plus occurrence values.
        words = [t.name for t in parsed.topics] + [o.value for o in parsed.occurrences]
        docs.append(
            textpipe.CorpusDoc(doc_id=doc_id, text=" ".join(words), label=labels[doc_id])
        )
    if not docs:
        raise ValidationError(f"no documents found under {base}")
    corpus = textpipe.Corpus(docs=docs, name=config.dataset)
    corpus.validate()
    return corpus, trees


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def cmd_ingest(config: ExperimentConfig) -> Path:
    """Persist forests, vectors, and the corpus manifest."""
    corpus, trees = _load_corpus(config)
    stopwords = _stopword_set(config)
    out = Path(config.out_dir)
    (out / "forests").mkdir(parents=True, exist_ok=True)

    for doc in corpus.docs:
        forest = trees.get(doc.doc_id)
        if forest is None:
            forest = textpipe.build_fallback_forest(
                doc.doc_id, doc.text, stopwords, config.stem
            )
        _write_json(out / "forests" / f"{doc.doc_id}.json", xtm.forest_to_json(forest))

    vocab, vectors = textpipe.vectorize(corpus, stopwords, config.stem)
    empty = [v.doc_id for v in vectors if v.is_zero]
    for doc_id in empty:
        print(f"warning: document {doc_id!r} has an empty term vector", file=sys.stderr)
    _write_json(
        out / "vectors.json",
        {
            "n_docs": vocab.n_docs,
            "df": vocab.df,
            "index": vocab.index,
            "vectors": {v.doc_id: v.entries for v in vectors},
        },
    )
    _write_json(
        out / "manifest.json",
        {
            "dataset": corpus.name,
            "mode": config.mode,
            "doc_ids": [d.doc_id for d in corpus.docs],
            "labels": {d.doc_id: d.label for d in corpus.docs},
            "classes": corpus.classes,
            "n_docs": len(corpus.docs),
            "empty_docs": empty,
        },
    )
    return out


def _read_manifest(out: Path) -> dict:
    path = out / "manifest.json"
    if not path.exists():
        raise ValidationError(f"no manifest at {path}; run ingest first")
    return json.loads(path.read_text("utf-8"))


def _read_forests(out: Path, doc_ids: list[str]) -> list[xtm.TopicForest]:
    forests = []
    for doc_id in doc_ids:
        path = out / "forests" / f"{doc_id}.json"
        if not path.exists():
            raise ValidationError(f"missing forest file {path}")
        forests.append(xtm.forest_from_json(doc_id, json.loads(path.read_text("utf-8"))))
    return forests


def _read_vectors(out: Path, doc_ids: list[str]) -> list[textpipe.TermVector]:
    path = out / "vectors.json"
    if not path.exists():
        raise ValidationError(f"no vectors at {path}; run ingest first")
    stored = json.loads(path.read_text("utf-8"))["vectors"]
    vectors = []
    for doc_id in doc_ids:
        if doc_id not in stored:
            raise ValidationError(f"no vector stored for document {doc_id!r}")
        entries = {t: float(w) for t, w in stored[doc_id].items()}
        vectors.append(textpipe.TermVector.make(doc_id, entries))
    return vectors


def cmd_simmatrix(config: ExperimentConfig, measure: str) -> Path:
    """Build and persist one measure's similarity matrix."""
    out = Path(config.out_dir)
    manifest = _read_manifest(out)
    doc_ids = manifest["doc_ids"]
    if measure == treesim.TM_MEASURE:
        matrix = treesim.build_matrix(_read_forests(out, doc_ids))
    else:
        matrix = simbase.build_matrix_base(measure, _read_vectors(out, doc_ids))
    csv_path = out / f"matrix_{measure}.csv"
    csv_path.write_text(matrix.to_csv(), encoding="utf-8")
    _write_json(out / f"matrix_{measure}.json", matrix.to_json())
    return csv_path


def _resolve_k(config: ExperimentConfig, manifest: dict) -> int:
    return config.k if config.k is not None else len(manifest["classes"])


def cmd_cluster(config: ExperimentConfig, measure: str) -> Path:
    """Cluster one measure's matrix and persist the dendrogram and cut."""
    out = Path(config.out_dir)
    manifest = _read_manifest(out)
    matrix_path = out / f"matrix_{measure}.csv"
    if not matrix_path.exists():
        raise ValidationError(f"missing matrix {matrix_path}; run simmatrix first")
    matrix = treesim.SimilarityMatrix.from_csv(matrix_path.read_text("utf-8"), measure)
    dendrogram = _cluster.hac(matrix, config.linkage)
    _write_json(out / f"dendrogram_{measure}.json", dendrogram.to_json())
    assignment = _cluster.cut(dendrogram, _resolve_k(config, manifest))
    path = out / f"assignment_{measure}.csv"
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["doc_id", "cluster"])
        for doc_id, cluster in zip(matrix.doc_ids, assignment.labels):
            writer.writerow([doc_id, cluster])
    return path


def cmd_evaluate(config: ExperimentConfig, measure: str) -> evalx.EvalReport:
    """Score one measure's assignment against the gold labels."""
    out = Path(config.out_dir)
    manifest = _read_manifest(out)
    path = out / f"assignment_{measure}.csv"
    if not path.exists():
        raise ValidationError(f"missing assignment {path}; run cluster first")
    doc_ids: list[str] = []
    labels: list[int] = []
    with path.open(newline="", encoding="utf-8") as handle:
        for row in csv.reader(handle):
            if row == ["doc_id", "cluster"] or not row:
                continue
            doc_ids.append(row[0])
            labels.append(int(row[1]))
    assignment = _cluster.ClusterAssignment(k=len(set(labels)), labels=labels)
    gold = [manifest["labels"].get(doc_id) for doc_id in doc_ids]
    report = evalx.evaluate(
        assignment, gold, measure, manifest["dataset"], doc_ids=doc_ids
    )
    _write_json(out / f"eval_{measure}.json", report.to_json())
    return report


def cmd_experiment(config: ExperimentConfig) -> Path:
    """Run the full pipeline for every configured measure."""
    out = cmd_ingest(config)
    manifest = _read_manifest(out)
    k = _resolve_k(config, manifest)
    rows = []
    for measure in config.measures:
        started = time.perf_counter()
        cmd_simmatrix(config, measure)
        cmd_cluster(config, measure)
        report = cmd_evaluate(config, measure)
        seconds = time.perf_counter() - started if config.timing else 0.0
        rows.append(
            (
                manifest["dataset"],
                measure,
                config.linkage,
                k,
                report.purity,
                report.entropy,
                seconds,
            )
        )
    report_path = out / "report.csv"
    with report_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for dataset, measure, linkage, row_k, pur, ent, secs in rows:
            writer.writerow(
                [dataset, measure, linkage, row_k, repr(pur), repr(ent), f"{secs:.3f}"]
            )
    _write_json(out / "run_config.json", config.to_json())
    for row in rows:
        print(
            f"{row[0]} {row[1]} linkage={row[2]} k={row[3]} "
            f"purity={row[4]:.4f} entropy={row[5]:.4f}"
        )
    return report_path


def _print_report(report: evalx.EvalReport) -> None:
    print(
        f"{report.dataset} {report.measure} k={report.k} "
        f"purity={report.purity:.4f} entropy={report.entropy:.4f}"
    )


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit code 1 for usage errors
        raise UsageError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", "-c", help="JSON config file (flags override it)")
    parser.add_argument("--corpus", help="corpus path")
    parser.add_argument("--mode", choices=MODE_CHOICES, help="corpus input mode")
    parser.add_argument("--out-dir", dest="out_dir", help="artifact output directory")
    parser.add_argument("--dataset", help="dataset name used in reports")
    parser.add_argument("--seed", type=int, help="seed recorded for reproducibility")
    parser.add_argument("--stopwords", help="override stopword list file")
    parser.add_argument(
        "--stem", action="store_true", help="apply the light suffix stripper"
    )
    parser.add_argument("--linkage", choices=_cluster.LINKAGES, help="HAC linkage")
    parser.add_argument("--k", type=int, help="cluster count (default: gold classes)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tmclust", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse the corpus into forests and vectors")
    _add_common(p_ingest)
    p_ingest.set_defaults(func=lambda cfg, args: cmd_ingest(cfg))

    p_matrix = sub.add_parser("simmatrix", help="build one similarity matrix")
    _add_common(p_matrix)
    p_matrix.add_argument("--measure", required=True, choices=MEASURE_CHOICES)
    p_matrix.set_defaults(func=lambda cfg, args: cmd_simmatrix(cfg, args.measure))

    p_cluster = sub.add_parser("cluster", help="cluster a similarity matrix")
    _add_common(p_cluster)
    p_cluster.add_argument("--measure", required=True, choices=MEASURE_CHOICES)
    p_cluster.set_defaults(func=lambda cfg, args: cmd_cluster(cfg, args.measure))

    p_eval = sub.add_parser("evaluate", help="score an assignment against gold labels")
    _add_common(p_eval)
    p_eval.add_argument("--measure", required=True, choices=MEASURE_CHOICES)
    p_eval.set_defaults(func=lambda cfg, args: _print_report(cmd_evaluate(cfg, args.measure)))

    p_exp = sub.add_parser("experiment", help="run every measure end to end")
    _add_common(p_exp)
    p_exp.add_argument("--measures", help="comma-separated measure list")
    p_exp.add_argument(
        "--timing",
        action="store_true",
        help="record wall-clock seconds in the report (breaks byte-identical reruns)",
    )
    p_exp.set_defaults(func=lambda cfg, args: cmd_experiment(cfg))

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = load_config(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        args.func(config, args)
    except TmclustError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
