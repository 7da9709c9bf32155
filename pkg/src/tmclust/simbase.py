"""Baseline pairwise similarity measures on sparse term vectors."""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError
from .textpipe import TermVector
from .treesim import SimilarityMatrix


def _dot(a: dict[str, float], b: dict[str, float]) -> float:
    if len(b) < len(a):
        a, b = b, a
    return sum(a[t] * b[t] for t in sorted(a) if t in b)


def _sum_squares(a: dict[str, float]) -> float:
    return sum(w * w for _, w in sorted(a.items()))


def cosine_sim(a: TermVector, b: TermVector) -> float:
    """dot(a, b) / (|a| * |b|); 0 when either vector is zero."""
    if a.norm == 0.0 or b.norm == 0.0:
        return 0.0
    return min(1.0, _dot(a.entries, b.entries) / (a.norm * b.norm))


def euclidean_sim(a: TermVector, b: TermVector) -> float:
    """1 / (1 + L2 distance) on L2-normalized inputs; zero vectors stay at the origin."""
    ua = {t: w / a.norm for t, w in a.entries.items()} if a.norm else {}
    ub = {t: w / b.norm for t, w in b.entries.items()} if b.norm else {}
    dist_sq = sum(
        (ua.get(t, 0.0) - ub.get(t, 0.0)) ** 2 for t in sorted(set(ua) | set(ub))
    )
    return 1.0 / (1.0 + math.sqrt(dist_sq))


def jaccard_sim(a: TermVector, b: TermVector) -> float:
    """dot(a, b) / (|a|^2 + |b|^2 - dot(a, b)); 0 when both vectors are zero."""
    dot = _dot(a.entries, b.entries)
    denom = _sum_squares(a.entries) + _sum_squares(b.entries) - dot
    if denom == 0.0:
        return 0.0
    return min(1.0, dot / denom)


def kld_sim(a: TermVector, b: TermVector) -> float:
    """1 minus the Jensen-Shannon divergence (log base 2) of the two
    term distributions, so identical distributions score 1 and disjoint
    supports score 0."""
    return 1.0 - jsd(a, b)


def jsd(a: TermVector, b: TermVector) -> float:
    for vec in (a, b):
        if not vec.entries or sum(vec.entries.values()) <= 0.0:
            raise ValidationError(
                f"kld similarity undefined for all-zero vector of document {vec.doc_id!r}"
            )
    total_a = sum(a.entries.values())
    total_b = sum(b.entries.values())
    divergence = 0.0
    for term in sorted(set(a.entries) | set(b.entries)):
        p = a.entries.get(term, 0.0) / total_a
        q = b.entries.get(term, 0.0) / total_b
        m = 0.5 * (p + q)
        part_p = 0.5 * p * math.log2(p / m) if p > 0.0 else 0.0
        part_q = 0.5 * q * math.log2(q / m) if q > 0.0 else 0.0
        divergence += part_p + part_q
    return min(1.0, max(0.0, divergence))


MEASURES = {
    "euclidean": euclidean_sim,
    "cosine": cosine_sim,
    "jaccard": jaccard_sim,
    "kld": kld_sim,
}


def build_matrix_base(measure: str, vectors: list[TermVector]) -> SimilarityMatrix:
    """Pairwise matrix for one baseline measure; diagonal pinned to 1."""
    if measure not in MEASURES:
        raise ValidationError(f"unknown measure {measure!r}")
    if len(vectors) < 2:
        raise ValidationError("need at least 2 vectors to build a matrix")
    func = MEASURES[measure]
    n = len(vectors)
    values = np.eye(n, dtype=float)
    for i in range(n):
        for j in range(i + 1, n):
            try:
                sim = func(vectors[i], vectors[j])
            except ValidationError as exc:
                raise ValidationError(
                    f"{measure} failed for pair "
                    f"({vectors[i].doc_id!r}, {vectors[j].doc_id!r}): {exc}"
                ) from exc
            values[i, j] = values[j, i] = sim
    matrix = SimilarityMatrix(
        measure=measure, doc_ids=[v.doc_id for v in vectors], values=values
    )
    matrix.validate()
    return matrix
