"""Similarity scoring and field-name-to-ontology-term alignment.

A field name is aligned with an ontology term when the average of the
cosine similarity of their embeddings and their edit similarity exceeds a
threshold ``r`` (default 0.85). Candidate search against large term sets is
pruned: the combined score can only exceed ``r`` when the cosine similarity
exceeds ``2r - 1``, so a blocked float32 scan with a small safety margin
selects survivor pairs, which are then rescored pairwise in float64. Kept
scores therefore match a direct pairwise computation exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Optional, Sequence

import numpy as np

from . import metrics
from .errors import ZeroVector

if TYPE_CHECKING:  # pragma: no cover - typing only
    from .cluster import ClusterSet
    from .distance import DistanceMatrix
    from .ontology import TermIndex

DEFAULT_THRESHOLD = 0.85
DEFAULT_TOP_K = 10

EDIT_METRIC_LEVENSHTEIN = "levenshtein"
EDIT_METRIC_JARO_WINKLER = "jaro_winkler"

_BLOCK_ROWS = 256
# Upper bound on the float32 scan error for unit vectors; survivors are
# selected against (floor - margin) and rescored exactly afterwards.
_SCAN_MARGIN = 1e-4


def _vector(x) -> np.ndarray:
    return np.asarray(getattr(x, "vector", x), dtype=np.float64)


def co_sim(x, y) -> float:
    """Cosine similarity of two embeddings, clamped to [-1, 1].

    Computed as dot(x, y) / sqrt(dot(x, x) * dot(y, y)); for bitwise-equal
    inputs this returns exactly 1.0.
    """
    vx, vy = _vector(x), _vector(y)
    nx = float(np.dot(vx, vx))
    ny = float(np.dot(vy, vy))
    if nx == 0.0 or ny == 0.0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    value = float(np.dot(vx, vy)) / math.sqrt(nx * ny)
    return min(1.0, max(-1.0, value))


def edit_similarity(a: str, b: str, edit_metric: str = EDIT_METRIC_LEVENSHTEIN) -> float:
    """The [0, 1] string similarity averaged with co_sim in the alignment rule."""
    if edit_metric == EDIT_METRIC_LEVENSHTEIN:
        return metrics.edit_sim(a, b)
    if edit_metric == EDIT_METRIC_JARO_WINKLER:
        return metrics.jaro_winkler(a, b)
    raise ValueError(f"unknown edit metric {edit_metric!r}")


def _stack(embeddings) -> np.ndarray:
    if isinstance(embeddings, np.ndarray):
        matrix = np.asarray(embeddings, dtype=np.float64)
    else:
        matrix = np.stack([_vector(e) for e in embeddings]).astype(np.float64, copy=False)
    if matrix.ndim != 2:
        raise ValueError("embeddings must form a 2-D array")
    return np.ascontiguousarray(matrix)


def _check_nonzero(matrix: np.ndarray, what: str) -> np.ndarray:
    norms_sq = np.einsum("ij,ij->i", matrix, matrix)
    zero = np.flatnonzero(norms_sq == 0.0)
    if zero.size:
        raise ZeroVector(f"{what} embedding at index {int(zero[0])} is a zero vector")
    return norms_sq


def _cosine_blocks(
    fields: np.ndarray, terms: np.ndarray, block_rows: int = _BLOCK_ROWS
) -> Iterable[tuple[int, np.ndarray]]:
    """Yield (row_start, cosine block) for consecutive field-row blocks.

    Both the full-matrix and the pruned top-k paths iterate these same
    blocks, so the two modes see bit-identical similarity values.
    """
    nf = _check_nonzero(fields, "field")
    nt = _check_nonzero(terms, "term")
    terms_t = terms.T  # transposed view, not a copy: hits the fast GEMM path
    for start in range(0, fields.shape[0], block_rows):
        stop = min(start + block_rows, fields.shape[0])
        block = fields[start:stop] @ terms_t
        # one division by sqrt(nf_i * nt_j): the denominator is symmetric in
        # (i, j), matching the pairwise co_sim formulation
        block /= np.sqrt(np.multiply.outer(nf[start:stop], nt))
        np.clip(block, -1.0, 1.0, out=block)
        yield start, block


def build_similarity_matrix(fields, terms) -> np.ndarray:
    """Materialize the full N x M cosine similarity matrix.

    Intended for corpora small enough to hold N*M float64 values; the pruned
    mode below covers the millions-of-terms regime.
    """
    f = _stack(fields)
    t = _stack(terms)
    out = np.empty((f.shape[0], t.shape[0]), dtype=np.float64)
    for start, block in _cosine_blocks(f, t):
        out[start : start + block.shape[0]] = block
    return out


def topk_similarities(
    fields, terms, top_k: int, floor: float
) -> list[list[tuple[int, float]]]:
    """Per-field top-k cosine matches above ``floor``, without materializing N x M.

    Keeps exactly the entries that full materialization would keep: values
    strictly above the floor, ranked by similarity descending with ties
    broken by lower term index, truncated to ``top_k``.
    """
    f = _stack(fields)
    t = _stack(terms)
    out: list[list[tuple[int, float]]] = []
    for start, block in _cosine_blocks(f, t):
        for local_row in range(block.shape[0]):
            row = block[local_row]
            candidates = np.flatnonzero(row > floor)
            order = np.lexsort((candidates, -row[candidates]))[:top_k]
            kept = candidates[order]
            out.append([(int(j), float(row[j])) for j in kept])
    return out


@dataclass(frozen=True)
class AlignmentCandidate:
    """One scored (field, ontology term) pair above the threshold."""

    field_index: int
    term_ref: int
    co_sim: float
    edit_sim: float
    combined: float


@dataclass
class AlignmentMap:
    """Ranked alignment candidates for every field in the corpus."""

    per_field: list[list[AlignmentCandidate]]
    threshold_r: float
    top_k: int
    edit_metric: str = EDIT_METRIC_LEVENSHTEIN
    cosine_floor: Optional[float] = None

    def __getitem__(self, field_index: int) -> list[AlignmentCandidate]:
        return self.per_field[field_index]

    def aligned_field_count(self) -> int:
        return sum(1 for candidates in self.per_field if candidates)


def _field_labels(corpus: Sequence) -> list[str]:
    return [getattr(item, "normalized", item) for item in corpus]


def align(
    corpus: Sequence,
    field_embeddings,
    index: "TermIndex",
    term_embeddings,
    r: float = DEFAULT_THRESHOLD,
    top_k: int = DEFAULT_TOP_K,
    edit_metric: str = EDIT_METRIC_LEVENSHTEIN,
    cosine_floor: Optional[float] = None,
    workers: int = 1,
) -> AlignmentMap:
    """Compute the alignment map of Definition-style combined scores.

    A candidate term is kept for a field when
    ``(co_sim + edit_sim) / 2 > r`` (and, if ``cosine_floor`` is set,
    additionally ``co_sim > cosine_floor``). Per-field lists are ranked by
    combined score descending, ties broken by higher co_sim then lower term
    index, and truncated to ``top_k``. Every field appears in the map, with
    an empty list when nothing passes.
    """
    labels = _field_labels(corpus)
    f = _stack(field_embeddings)
    t = _stack(term_embeddings)
    if f.shape[0] != len(labels):
        raise ValueError("corpus and field embeddings disagree on N")
    if t.shape[0] != len(index.terms):
        raise ValueError("term index and term embeddings disagree on M")

    floor = 2.0 * r - 1.0
    if cosine_floor is not None:
        floor = max(floor, cosine_floor)
    survivors = _scan_survivors(f, t, floor - _SCAN_MARGIN, workers)

    per_field: list[list[AlignmentCandidate]] = [[] for _ in labels]
    for i, js in survivors:
        label = labels[i]
        fi = f[i]
        rows: list[AlignmentCandidate] = []
        for j in js:
            cos = co_sim(fi, t[j])
            if cosine_floor is not None and not cos > cosine_floor:
                continue
            sim = edit_similarity(label, index.terms[j].normalized_label, edit_metric)
            combined = (cos + sim) / 2.0
            if combined > r:
                rows.append(
                    AlignmentCandidate(
                        field_index=i, term_ref=int(j), co_sim=cos, edit_sim=sim, combined=combined
                    )
                )
        rows.sort(key=lambda c: (-c.combined, -c.co_sim, c.term_ref))
        per_field[i] = rows[:top_k]
    return AlignmentMap(
        per_field=per_field,
        threshold_r=r,
        top_k=top_k,
        edit_metric=edit_metric,
        cosine_floor=cosine_floor,
    )


def _scan_survivors(
    f: np.ndarray, t: np.ndarray, scan_floor: float, workers: int
) -> list[tuple[int, np.ndarray]]:
    """Blocked float32 cosine scan returning per-field survivor term indices.

    float32 keeps the scan memory- and time-cheap; the margin folded into
    ``scan_floor`` covers its rounding error, and callers rescore survivors
    in float64, so the final output is unaffected by this approximation.
    """
    _check_nonzero(f, "field")
    _check_nonzero(t, "term")
    f32 = f.astype(np.float32)
    t32 = t.astype(np.float32)
    nf = np.einsum("ij,ij->i", f32, f32)
    nt = np.einsum("ij,ij->i", t32, t32)
    inv_f = 1.0 / np.sqrt(nf)
    inv_t = 1.0 / np.sqrt(nt)
    t32_t = t32.T
    n = f32.shape[0]

    def scan_range(row_start: int, row_stop: int) -> list[tuple[int, np.ndarray]]:
        found: list[tuple[int, np.ndarray]] = []
        for start in range(row_start, row_stop, _BLOCK_ROWS):
            stop = min(start + _BLOCK_ROWS, row_stop)
            block = f32[start:stop] @ t32_t
            block *= inv_f[start:stop, None]
            block *= inv_t[None, :]
            hit_rows, hit_cols = np.nonzero(block > scan_floor)
            if hit_rows.size:
                for local_row in np.unique(hit_rows):
                    found.append((start + int(local_row), hit_cols[hit_rows == local_row]))
        return found

    if workers <= 1:
        return scan_range(0, n)
    from concurrent.futures import ThreadPoolExecutor

    # Hand each worker whole multiples of the block size so the per-block
    # GEMM calls are identical to the single-worker run.
    blocks_total = (n + _BLOCK_ROWS - 1) // _BLOCK_ROWS
    blocks_per_worker = (blocks_total + workers - 1) // workers
    step = blocks_per_worker * _BLOCK_ROWS
    results: list[list[tuple[int, np.ndarray]]] = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(scan_range, start, min(start + step, n)) for start in range(0, n, step)
        ]
        for future in futures:
            results.append(future.result())
    merged: list[tuple[int, np.ndarray]] = []
    for part in results:
        merged.extend(part)
    merged.sort(key=lambda pair: pair[0])
    return merged


@dataclass(frozen=True)
class ClusterRecommendation:
    """The single ontology covering the most aligned members of a cluster."""

    cluster_id: int
    ontology_id: str
    covered_fields: frozenset[int]
    covered_count: int


@dataclass(frozen=True)
class CoverageReport:
    """Cluster-level alignment coverage summary."""

    num_recs: int
    coverage_pct: float
    avg_fields_covered: float
    median_fields_covered: float


def recommend_ontology(
    cluster: Iterable[int],
    amap: AlignmentMap,
    index: "TermIndex",
    cluster_id: int = -1,
) -> Optional[ClusterRecommendation]:
    """Pick the ontology that aligns the most members of one cluster.

    Ties break toward the lexicographically smallest ontology id. Returns
    None when no member has any candidate.
    """
    covered: dict[str, set[int]] = {}
    for field_index in cluster:
        for candidate in amap.per_field[field_index]:
            ontology_id = index.terms[candidate.term_ref].ontology_id
            covered.setdefault(ontology_id, set()).add(field_index)
    if not covered:
        return None
    ontology_id, fields = min(covered.items(), key=lambda kv: (-len(kv[1]), kv[0]))
    return ClusterRecommendation(
        cluster_id=cluster_id,
        ontology_id=ontology_id,
        covered_fields=frozenset(fields),
        covered_count=len(fields),
    )


def recommend_clusters(
    clusters: "ClusterSet", amap: AlignmentMap, index: "TermIndex"
) -> list[Optional[ClusterRecommendation]]:
    """recommend_ontology applied to every non-noise cluster, in cluster order."""
    return [
        recommend_ontology(members, amap, index, cluster_id=cluster_id)
        for cluster_id, members in enumerate(clusters.clusters())
    ]


def coverage_report(
    clusters: "ClusterSet", amap: AlignmentMap, index: "TermIndex"
) -> CoverageReport:
    """Summarize how many clusters have an ontology recommendation.

    Average and median fields covered are computed over the clusters that do
    have a recommendation.
    """
    from .errors import AllNoise

    recommendations = recommend_clusters(clusters, amap, index)
    if not recommendations:
        raise AllNoise("clustering produced no clusters to report on")
    covered_counts = sorted(rec.covered_count for rec in recommendations if rec is not None)
    num_recs = len(covered_counts)
    coverage_pct = 100.0 * num_recs / len(recommendations)
    if num_recs == 0:
        return CoverageReport(0, 0.0, 0.0, 0.0)
    avg = sum(covered_counts) / num_recs
    mid = num_recs // 2
    if num_recs % 2:
        median = float(covered_counts[mid])
    else:
        median = (covered_counts[mid - 1] + covered_counts[mid]) / 2.0
    return CoverageReport(
        num_recs=num_recs,
        coverage_pct=coverage_pct,
        avg_fields_covered=avg,
        median_fields_covered=median,
    )


def cluster_neighbors(
    clusters: "ClusterSet", matrix: "DistanceMatrix", k: int = 3
) -> list[list[tuple[int, float]]]:
    """For every field, its k nearest same-cluster neighbors (by distance).

    Purely an annotation to help curators judge a suggestion against what
    similar field names aligned to; neighbor lists never influence scores.
    Noise points get empty lists. Ties break toward the lower index.
    """
    member_lists = clusters.clusters()
    out: list[list[tuple[int, float]]] = [[] for _ in range(len(clusters.assignments))]
    for members in member_lists:
        for i in members:
            others = [(matrix.get(i, j), j) for j in members if j != i]
            others.sort()
            out[i] = [(j, dist) for dist, j in others[:k]]
    return out
