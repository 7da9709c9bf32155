"""Root-preserving common-subtree similarity between topic forests.

A mapping between two forests is a set of node-number pairs that is
one-to-one, label-preserving, ancestor-preserving in both directions,
sibling-order-preserving in both directions, and contains the root pair
whenever it is non-empty.  `max_common_subtree` finds a maximum mapping
with a memoized dynamic program over ordered forests (a node may be left
unmatched, which promotes its children into its sibling position, so
matches can skip levels).  `brute_force_common_subtree` is an exhaustive
oracle for small trees and shares no code with the DP beyond node
numbering.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .xtm import TopicForest, TopicNode, iter_bfs, number_nodes

TM_MEASURE = "tm-sim"


@dataclass(frozen=True)
class Mapping:
    """Pairs (i, j) of BFS node numbers, T1 side first."""

    pairs: frozenset[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass
class SimilarityMatrix:
    measure: str
    doc_ids: list[str]
    values: np.ndarray

    def validate(self) -> None:
        n = len(self.doc_ids)
        if self.values.shape != (n, n):
            raise ValidationError(
                f"matrix shape {self.values.shape} does not match {n} doc ids"
            )
        if not np.array_equal(self.values, self.values.T):
            raise ValidationError(f"{self.measure} matrix is not symmetric")
        if np.any(self.values < 0.0) or np.any(self.values > 1.0):
            raise ValidationError(f"{self.measure} matrix has entries outside [0, 1]")
        if not np.all(np.diag(self.values) == 1.0):
            raise ValidationError(f"{self.measure} matrix diagonal is not 1")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["doc_id"] + self.doc_ids)
        for doc_id, row in zip(self.doc_ids, self.values):
            writer.writerow([doc_id] + [repr(float(v)) for v in row])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "measure": self.measure,
            "ids": list(self.doc_ids),
            "rows": [[float(v) for v in row] for row in self.values],
        }

    @classmethod
    def from_csv(cls, text: str, measure: str) -> "SimilarityMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0][:1] != ["doc_id"]:
            raise ValidationError("matrix CSV must start with a doc_id header row")
        doc_ids = rows[0][1:]
        values = np.array(
            [[float(cell) for cell in row[1:]] for row in rows[1:]], dtype=float
        )
        matrix = cls(measure=measure, doc_ids=doc_ids, values=values)
        matrix.validate()
        return matrix


class _Codec:
    """Interns labels and subtree shapes so ids compare across forests."""

    def __init__(self) -> None:
        self.labels: dict[str, int] = {}
        self.shapes: dict[tuple, int] = {}

    def label_id(self, label: str) -> int:
        return self.labels.setdefault(label, len(self.labels))

    def shape_id(self, key: tuple) -> int:
        return self.shapes.setdefault(key, len(self.shapes))


class _Tree:
    """BFS-indexed arrays for one forest (index k <-> node number k + 1)."""

    __slots__ = ("labels", "children", "sizes", "shapes", "n")

    def __init__(self, forest: TopicForest, codec: _Codec) -> None:
        order = list(iter_bfs(forest.root))
        index = {id(node): k for k, node in enumerate(order)}
        self.n = len(order)
        self.labels = [codec.label_id(node.label) for node in order]
        self.children = [
            tuple(index[id(c)] for c in node.children) for node in order
        ]
        self.sizes = [0] * self.n
        self.shapes = [0] * self.n
        for k in range(self.n - 1, -1, -1):
            kids = self.children[k]
            self.sizes[k] = 1 + sum(self.sizes[c] for c in kids)
            key = (self.labels[k], tuple(self.shapes[c] for c in kids))
            self.shapes[k] = codec.shape_id(key)


def _forest_lcs(
    f1: tuple[int, ...],
    f2: tuple[int, ...],
    t1: _Tree,
    t2: _Tree,
    memo: dict,
) -> int:
    if not f1 or not f2:
        return 0
    key = (f1, f2)
    cached = memo.get(key)
    if cached is not None:
        return cached
    if tuple(t1.shapes[i] for i in f1) == tuple(t2.shapes[j] for j in f2):
        value = sum(t1.sizes[i] for i in f1)
        memo[key] = value
        return value
    v, rest1 = f1[0], f1[1:]
    w, rest2 = f2[0], f2[1:]
    value = max(
        _forest_lcs(t1.children[v] + rest1, f2, t1, t2, memo),
        _forest_lcs(f1, t2.children[w] + rest2, t1, t2, memo),
    )
    if t1.labels[v] == t2.labels[w]:
        matched = (
            1
            + _forest_lcs(t1.children[v], t2.children[w], t1, t2, memo)
            + _forest_lcs(rest1, rest2, t1, t2, memo)
        )
        if matched > value:
            value = matched
    memo[key] = value
    return value


def _trace(
    f1: tuple[int, ...],
    f2: tuple[int, ...],
    t1: _Tree,
    t2: _Tree,
    memo: dict,
    out: list[tuple[int, int]],
) -> None:
    while f1 and f2:
        if tuple(t1.shapes[i] for i in f1) == tuple(t2.shapes[j] for j in f2):
            stack = list(zip(f1, f2))
            while stack:
                v, w = stack.pop()
                out.append((v, w))
                stack.extend(zip(t1.children[v], t2.children[w]))
            return
        target = _forest_lcs(f1, f2, t1, t2, memo)
        v, rest1 = f1[0], f1[1:]
        w, rest2 = f2[0], f2[1:]
        if t1.labels[v] == t2.labels[w]:
            inner = _forest_lcs(t1.children[v], t2.children[w], t1, t2, memo)
            outer = _forest_lcs(rest1, rest2, t1, t2, memo)
            if 1 + inner + outer == target:
                out.append((v, w))
                _trace(t1.children[v], t2.children[w], t1, t2, memo, out)
                f1, f2 = rest1, rest2
                continue
        promoted1 = t1.children[v] + rest1
        if _forest_lcs(promoted1, f2, t1, t2, memo) == target:
            f1 = promoted1
            continue
        f2 = t2.children[w] + rest2


def common_subtree_size(a: TopicForest, b: TopicForest, codec: _Codec | None = None) -> int:
    """Cardinality of a maximum valid mapping between the two forests."""
    codec = codec or _Codec()
    t1, t2 = _Tree(a, codec), _Tree(b, codec)
    if t1.labels[0] != t2.labels[0]:
        return 0
    return 1 + _forest_lcs(t1.children[0], t2.children[0], t1, t2, {})


def max_common_subtree(a: TopicForest, b: TopicForest) -> Mapping:
    """A maximum root-preserving mapping, as BFS node-number pairs."""
    codec = _Codec()
    t1, t2 = _Tree(a, codec), _Tree(b, codec)
    if t1.labels[0] != t2.labels[0]:
        return Mapping(frozenset())
    memo: dict = {}
    _forest_lcs(t1.children[0], t2.children[0], t1, t2, memo)
    collected: list[tuple[int, int]] = [(0, 0)]
    _trace(t1.children[0], t2.children[0], t1, t2, memo, collected)
    return Mapping(frozenset((i + 1, j + 1) for i, j in collected))


def tm_similarity(a: TopicForest, b: TopicForest, codec: _Codec | None = None) -> float:
    """Dice-style similarity over non-root nodes, in [0, 1].

    sim = (2*|mapping| - 2) / (n1 + n2 - 2); the shared synthetic root is
    discounted.  Two root-only forests are defined as identical (1.0).
    """
    n1, n2 = a.n, b.n
    if n1 == 1 and n2 == 1:
        return 1.0
    size = common_subtree_size(a, b, codec)
    return (2.0 * size - 2.0) / (n1 + n2 - 2.0)


def build_matrix(forests: list[TopicForest]) -> SimilarityMatrix:
    """Pairwise tm-sim matrix; pair computations are independent."""
    if len(forests) < 2:
        raise ValidationError("need at least 2 forests to build a matrix")
    codec = _Codec()
    n = len(forests)
    values = np.eye(n, dtype=float)
    for i in range(n):
        for j in range(i + 1, n):
            sim = tm_similarity(forests[i], forests[j], codec)
            values[i, j] = values[j, i] = sim
    matrix = SimilarityMatrix(
        measure=TM_MEASURE, doc_ids=[f.doc_id for f in forests], values=values
    )
    matrix.validate()
    return matrix


# Relation codes used by the oracle and the independent mapping checker.
_SELF, _ANC, _DESC, _LEFT, _RIGHT = 0, 1, 2, 3, 4


def _relation_table(forest: TopicForest) -> tuple[dict[int, str], list[list[int]]]:
    """Full pairwise relation matrix over BFS node numbers, 1-based."""
    numbers = number_nodes(forest)
    labels = {k: node.label for node, k in numbers.items()}
    parent: dict[int, int] = {}
    preorder: dict[int, int] = {}

    def walk(node: TopicNode, counter: list[int]) -> None:
        preorder[numbers[node]] = counter[0]
        counter[0] += 1
        for child in node.children:
            parent[numbers[child]] = numbers[node]
            walk(child, counter)

    walk(forest.root, [0])
    n = len(numbers)
    ancestors: dict[int, set[int]] = {}
    for k in range(1, n + 1):
        chain = set()
        cur = k
        while cur in parent:
            cur = parent[cur]
            chain.add(cur)
        ancestors[k] = chain
    rel = [[_SELF] * (n + 1) for _ in range(n + 1)]
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            if u == v:
                rel[u][v] = _SELF
            elif u in ancestors[v]:
                rel[u][v] = _ANC
            elif v in ancestors[u]:
                rel[u][v] = _DESC
            elif preorder[u] < preorder[v]:
                rel[u][v] = _LEFT
            else:
                rel[u][v] = _RIGHT
    return labels, rel


def mapping_violations(a: TopicForest, b: TopicForest, mapping: Mapping) -> list[str]:
    """Check a mapping against all five invariants, from first principles."""
    labels1, rel1 = _relation_table(a)
    labels2, rel2 = _relation_table(b)
    pairs = sorted(mapping.pairs)
    problems: list[str] = []
    seen_i: set[int] = set()
    seen_j: set[int] = set()
    for i, j in pairs:
        if i not in labels1 or j not in labels2:
            problems.append(f"pair ({i},{j}) is out of range")
            continue
        if labels1[i] != labels2[j]:
            problems.append(f"pair ({i},{j}) is not label-preserving")
        if i in seen_i or j in seen_j:
            problems.append(f"pair ({i},{j}) breaks one-to-one")
        seen_i.add(i)
        seen_j.add(j)
    if pairs and (1, 1) not in mapping.pairs:
        problems.append("non-empty mapping does not contain the root pair")
    for x in range(len(pairs)):
        i1, j1 = pairs[x]
        for y in range(x + 1, len(pairs)):
            i2, j2 = pairs[y]
            if rel1[i1][i2] != rel2[j1][j2]:
                problems.append(
                    f"pairs ({i1},{j1}) and ({i2},{j2}) disagree on order/ancestry"
                )
    return problems


def brute_force_common_subtree(a: TopicForest, b: TopicForest) -> Mapping:
    """Exhaustive maximum-mapping search; refuses trees above 10 nodes."""
    n1, n2 = a.n, b.n
    if n1 > 10 or n2 > 10:
        raise ValueError(
            f"brute force oracle limited to 10 nodes per tree, got {n1} and {n2}"
        )
    labels1, rel1 = _relation_table(a)
    labels2, rel2 = _relation_table(b)
    candidates = {
        i: [j for j in range(1, n2 + 1) if labels2[j] == labels1[i]]
        for i in range(1, n1 + 1)
    }
    best: list[tuple[int, int]] = []

    def search(i: int, chosen: list[tuple[int, int]], used: set[int]) -> None:
        nonlocal best
        if len(chosen) + (n1 - i + 1) <= len(best):
            return
        if i > n1:
            if len(chosen) > len(best):
                best = list(chosen)
            return
        for j in candidates[i]:
            if j in used:
                continue
            if all(rel1[pi][i] == rel2[pj][j] for pi, pj in chosen):
                chosen.append((i, j))
                used.add(j)
                search(i + 1, chosen, used)
                chosen.pop()
                used.remove(j)
        search(i + 1, chosen, used)

    if labels1[1] == labels2[1]:
        search(2, [(1, 1)], {1})
    return Mapping(frozenset(best))
