"""Corpus loading, TF-IDF term vectors, and fallback topic forests."""

from __future__ import annotations

import csv
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import ValidationError
from .xtm import (
    DOC_ROOT_LABEL,
    TopicForest,
    TopicNode,
    forest_from_json,
    sort_forest,
)

_TOKEN_RE = re.compile(r"[a-z]+")
_SENTENCE_RE = re.compile(r"[.!?]+")


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    text = resources.files("tmclust.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Load a one-word-per-line stopword file."""
    words = Path(path).read_text("utf-8").splitlines()
    return frozenset(w.strip().lower() for w in words if w.strip())


@dataclass(frozen=True)
class CorpusDoc:
    doc_id: str
    text: str
    label: str


@dataclass
class Corpus:
    docs: list[CorpusDoc]
    name: str = ""

    @property
    def classes(self) -> list[str]:
        return sorted({d.label for d in self.docs})

    def validate(self) -> None:
        seen: set[str] = set()
        for doc in self.docs:
            if doc.doc_id in seen:
                raise ValidationError(f"duplicate doc_id {doc.doc_id!r}")
            seen.add(doc.doc_id)
            if not doc.label:
                raise ValidationError(f"document {doc.doc_id!r} has no gold label")


@dataclass
class Vocabulary:
    """Term statistics for a corpus: index, document frequency, doc count."""

    index: dict[str, int]
    df: dict[str, int]
    n_docs: int


@dataclass
class TermVector:
    doc_id: str
    entries: dict[str, float]
    norm: float

    @classmethod
    def make(cls, doc_id: str, entries: dict[str, float]) -> "TermVector":
        norm = math.sqrt(sum(w * w for _, w in sorted(entries.items())))
        return cls(doc_id=doc_id, entries=entries, norm=norm)

    @property
    def is_zero(self) -> bool:
        return not self.entries


def light_stem(token: str) -> str:
    """Strip a few common English suffixes; deliberately not a full stemmer."""
    if token.endswith("ies") and len(token) >= 5:
        return token[:-3] + "y"
    if token.endswith("ing") and len(token) >= 6:
        return token[:-3]
    if token.endswith("ed") and len(token) >= 5:
        return token[:-2]
    if token.endswith(("ches", "shes", "sses", "xes", "zes")) and len(token) >= 5:
        return token[:-2]
    if token.endswith("s") and not token.endswith("ss") and len(token) >= 4:
        return token[:-1]
    return token


def tokenize(
    text: str, stopwords: frozenset[str] | None = None, stem: bool = False
) -> list[str]:
    """Lower-cased alphabetic tokens, length >= 2, stopwords removed.

    Stemming is off by default; `stem=True` applies `light_stem` to the
    surviving tokens.
    """
    stop = default_stopwords() if stopwords is None else stopwords
    tokens = [
        tok
        for tok in _TOKEN_RE.findall(text.lower())
        if len(tok) >= 2 and tok not in stop
    ]
    if stem:
        tokens = [light_stem(tok) for tok in tokens]
    return tokens


def vectorize(
    corpus: Corpus, stopwords: frozenset[str] | None = None, stem: bool = False
) -> tuple[Vocabulary, list[TermVector]]:
    """TF-IDF vectors with weight(t, d) = tf(t, d) * ln(1 + N / df(t)).

    Documents with no surviving tokens get empty (zero) vectors; callers
    can detect them via `TermVector.is_zero`.
    """
    if not corpus.docs:
        raise ValidationError("cannot vectorize an empty corpus")
    doc_terms = [Counter(tokenize(doc.text, stopwords, stem)) for doc in corpus.docs]
    df: Counter[str] = Counter()
    for counts in doc_terms:
        df.update(counts.keys())
    n_docs = len(corpus.docs)
    vocab = Vocabulary(
        index={term: i for i, term in enumerate(sorted(df))},
        df=dict(sorted(df.items())),
        n_docs=n_docs,
    )
    idf = {term: math.log(1.0 + n_docs / count) for term, count in df.items()}
    vectors = [
        TermVector.make(
            doc.doc_id,
            {term: tf * idf[term] for term, tf in sorted(counts.items())},
        )
        for doc, counts in zip(corpus.docs, doc_terms)
    ]
    return vocab, vectors


def split_sentences(text: str) -> list[str]:
    return [part for part in _SENTENCE_RE.split(text) if part.strip()]


def build_fallback_forest(
    doc_id: str, text: str, stopwords: frozenset[str] | None = None, stem: bool = False
) -> TopicForest:
    """Deterministic two-level topic forest for plain text.

    Each sentence contributes one depth-1 topic: the sentence token that is
    most frequent in the whole document (ties to the lexicographically
    smallest).  The sentence's remaining distinct tokens become that topic's
    children; repeated topics merge and their child sets union.
    """
    sentence_tokens = [tokenize(s, stopwords, stem) for s in split_sentences(text)]
    doc_counts: Counter[str] = Counter()
    for tokens in sentence_tokens:
        doc_counts.update(tokens)

    children_of: dict[str, set[str]] = {}
    for tokens in sentence_tokens:
        if not tokens:
            continue
        distinct = set(tokens)
        topic = min(distinct, key=lambda t: (-doc_counts[t], t))
        children_of.setdefault(topic, set()).update(distinct - {topic})

    root = TopicNode(label=DOC_ROOT_LABEL)
    for topic in sorted(children_of):
        node = TopicNode(label=topic)
        node.children = [TopicNode(label=c) for c in sorted(children_of[topic])]
        root.children.append(node)
    return sort_forest(TopicForest(doc_id=doc_id, root=root))


def load_text_dir(path: str | Path, name: str = "") -> Corpus:
    """Load a directory of .txt files plus a labels.csv (doc_id,label)."""
    base = Path(path)
    labels = read_labels(base / "labels.csv")
    docs = []
    for txt in sorted(base.glob("*.txt")):
        doc_id = txt.stem
        if doc_id not in labels:
            raise ValidationError(f"document {doc_id!r} missing from labels.csv")
        docs.append(CorpusDoc(doc_id=doc_id, text=txt.read_text("utf-8"), label=labels[doc_id]))
    if not docs:
        raise ValidationError(f"no documents found under {base}")
    corpus = Corpus(docs=docs, name=name or base.name)
    corpus.validate()
    return corpus


def read_labels(path: Path) -> dict[str, str]:
    if not path.exists():
        raise ValidationError(f"labels file not found: {path}")
    labels: dict[str, str] = {}
    with path.open(newline="", encoding="utf-8") as handle:
        for row in csv.reader(handle):
            if not row or row == ["doc_id", "label"]:
                continue
            if len(row) < 2:
                raise ValidationError(f"bad labels.csv row: {row!r}")
            labels[row[0]] = row[1]
    return labels


def load_jsonl(path: str | Path, name: str = "") -> tuple[Corpus, dict[str, TopicForest]]:
    """Load a JSONL corpus ({"id","text","label"} per line).

    A record may carry an optional "tree" field in the JSON tree fixture
    format; those become the document's forest instead of the fallback
    builder's output.
    """
    base = Path(path)
    docs: list[CorpusDoc] = []
    trees: dict[str, TopicForest] = {}
    with base.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{base}:{lineno}: bad JSON: {exc}") from exc
            for key in ("id", "text", "label"):
                if key not in record:
                    raise ValidationError(f"{base}:{lineno}: record missing {key!r}")
            doc_id = str(record["id"])
            docs.append(
                CorpusDoc(doc_id=doc_id, text=str(record["text"]), label=str(record["label"]))
            )
            if "tree" in record:
                trees[doc_id] = forest_from_json(doc_id, record["tree"])
    if not docs:
        raise ValidationError(f"no documents found in {base}")
    corpus = Corpus(docs=docs, name=name or base.stem)
    corpus.validate()
    return corpus, trees
