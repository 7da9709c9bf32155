"""Hierarchical agglomerative clustering over a similarity matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .treesim import SimilarityMatrix

LINKAGES = ("single", "complete", "average")


@dataclass
class Dendrogram:
    """Merge history; leaves are doc indices 0..N-1, merged clusters get
    fresh ids N, N+1, ... in merge order."""

    n_leaves: int
    merges: list[tuple[int, int, float, int]]

    def to_json(self) -> dict:
        return {
            "n_leaves": self.n_leaves,
            "merges": [[a, b, sim, new] for a, b, sim, new in self.merges],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Dendrogram":
        merges = [(int(a), int(b), float(s), int(n)) for a, b, s, n in obj["merges"]]
        return cls(n_leaves=int(obj["n_leaves"]), merges=merges)


@dataclass
class ClusterAssignment:
    """Flat cut: doc index -> cluster id in 0..k-1, all k clusters non-empty."""

    k: int
    labels: list[int]


def hac(matrix: SimilarityMatrix, linkage: str = "average") -> Dendrogram:
    """Greedy agglomeration merging the most similar pair of clusters.

    Ties are broken by the smallest (cluster id, cluster id) pair.  Merged
    similarities are maintained in place: single keeps the max, complete
    the min, average the size-weighted mean.
    """
    if linkage not in LINKAGES:
        raise ValidationError(f"unknown linkage {linkage!r}")
    matrix.validate()
    n = len(matrix.doc_ids)
    if n < 2:
        raise ValidationError("need at least 2 documents to cluster")

    sims = matrix.values.astype(float).copy()
    np.fill_diagonal(sims, -np.inf)
    active = list(range(n))
    cluster_id = list(range(n))
    sizes = [1] * n
    merges: list[tuple[int, int, float, int]] = []

    for step in range(n - 1):
        sub = sims[np.ix_(active, active)]
        best = float(sub.max())
        ii, jj = np.nonzero(sub == best)
        pick = min(
            (tuple(sorted((cluster_id[active[x]], cluster_id[active[y]]))), active[x], active[y])
            for x, y in zip(ii, jj)
            if x < y
        )
        (left, right), slot_a, slot_b = pick

        if linkage == "single":
            row = np.maximum(sims[slot_a], sims[slot_b])
        elif linkage == "complete":
            row = np.minimum(sims[slot_a], sims[slot_b])
        else:
            size_a, size_b = sizes[slot_a], sizes[slot_b]
            row = (size_a * sims[slot_a] + size_b * sims[slot_b]) / (size_a + size_b)
        sims[slot_a, :] = row
        sims[:, slot_a] = row
        sims[slot_a, slot_a] = -np.inf
        sims[slot_b, :] = -np.inf
        sims[:, slot_b] = -np.inf

        new_id = n + step
        merges.append((left, right, best, new_id))
        sizes[slot_a] += sizes[slot_b]
        cluster_id[slot_a] = new_id
        active.remove(slot_b)

    return Dendrogram(n_leaves=n, merges=merges)


def cut(dendrogram: Dendrogram, k: int) -> ClusterAssignment:
    """Undo the last k-1 merges; surviving components are the clusters,
    numbered 0..k-1 by their smallest document index."""
    n = dendrogram.n_leaves
    if not 1 <= k <= n:
        raise ValidationError(f"k={k} out of range 1..{n}")
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    for left, right, _, new_id in dendrogram.merges[: n - k]:
        members[new_id] = members.pop(left) + members.pop(right)
    groups = sorted(members.values(), key=min)
    labels = [0] * n
    for cluster, docs in enumerate(groups):
        for doc in docs:
            labels[doc] = cluster
    return ClusterAssignment(k=k, labels=labels)
