"""Affinity propagation over a precomputed distance matrix.

Standard responsibility/availability message passing on the similarity
matrix ``s(i, k) = -D[i][k]`` with the self-similarity (preference) on the
diagonal. No noise is injected into the similarities, so runs are exactly
reproducible; degenerate ties resolve through numpy's first-maximum rule.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ..distance import DistanceMatrix
from . import ALGORITHM_AFFINITY_PROPAGATION, ClusterSet, relabel_by_smallest_member

logger = logging.getLogger(__name__)


def affinity_propagation(
    matrix: DistanceMatrix,
    damping: float = 0.9,
    max_iter: int = 1000,
    convergence_iter: int = 50,
    preference: Optional[float] = None,
    workers: int = 1,
) -> ClusterSet:
    """Cluster by affinity propagation.

    The preference defaults to the median off-diagonal similarity. Exemplars
    are the indices where ``r(k,k) + a(k,k) > 0`` once the exemplar set has
    been stable for ``convergence_iter`` iterations; every point then joins
    its most similar exemplar, ties going to the lowest exemplar index.

    If the exemplar set is still oscillating after ``max_iter`` iterations
    the result is returned anyway with ``converged=False`` and a warning.
    Deterministic for fixed inputs and parameters, for any worker count.
    """
    if not 0.5 <= damping < 1.0:
        raise ValueError(f"damping must be in [0.5, 1), got {damping}")
    n = matrix.n
    params = {
        "damping": damping,
        "max_iter": max_iter,
        "convergence_iter": convergence_iter,
        "preference": preference,
        "workers": workers,
    }
    if n == 1:
        return ClusterSet(
            algorithm=ALGORITHM_AFFINITY_PROPAGATION,
            metric=matrix.metric,
            assignments=np.zeros(1, dtype=np.int64),
            params=params,
            exemplars={0: 0},
        )

    similarity = -matrix.to_square()
    if preference is None:
        preference = -float(np.median(matrix.values))
    np.fill_diagonal(similarity, preference)
    params["preference"] = float(preference)

    responsibility = np.zeros((n, n), dtype=np.float64)
    availability = np.zeros((n, n), dtype=np.float64)
    diag = np.arange(n)

    stable = 0
    last_exemplars: Optional[frozenset[int]] = None
    converged = False
    pool = None
    row_ranges = _split_ranges(n, workers)
    if len(row_ranges) > 1:
        from concurrent.futures import ThreadPoolExecutor

        pool = ThreadPoolExecutor(max_workers=len(row_ranges))
    try:
        for _ in range(max_iter):
            previous_responsibility = responsibility
            previous_availability = availability
            new_responsibility = np.empty_like(responsibility)
            _map_ranges(pool, row_ranges, _update_responsibility_rows,
                        similarity, availability, new_responsibility)
            responsibility = damping * responsibility + (1.0 - damping) * new_responsibility

            positive = np.maximum(responsibility, 0.0)
            positive[diag, diag] = responsibility[diag, diag]
            new_availability = np.empty_like(availability)
            _map_ranges(pool, row_ranges, _update_availability_cols, positive, new_availability)
            availability = damping * availability + (1.0 - damping) * new_availability

            exemplars = frozenset(
                np.flatnonzero(responsibility[diag, diag] + availability[diag, diag] > 0).tolist()
            )
            # An empty exemplar set only counts toward stability once the
            # messages themselves are at a fixpoint (fully tied inputs); an
            # empty set during warm-up must not end the run.
            at_fixpoint = np.array_equal(responsibility, previous_responsibility) and np.array_equal(
                availability, previous_availability
            )
            if exemplars == last_exemplars and (exemplars or at_fixpoint):
                stable += 1
                if stable >= convergence_iter:
                    converged = bool(exemplars)
                    break
            else:
                stable = 0
            last_exemplars = exemplars
    finally:
        if pool is not None:
            pool.shutdown()

    diagonal_evidence = responsibility[diag, diag] + availability[diag, diag]
    exemplar_indices = np.flatnonzero(diagonal_evidence > 0)
    if exemplar_indices.size == 0:
        # Degenerate run with no self-elected exemplar; fall back to the
        # single strongest candidate so the ClusterSet invariants still hold.
        exemplar_indices = np.array([int(np.argmax(diagonal_evidence))])
        converged = False
    if not converged:
        logger.warning(
            "affinity propagation did not converge after %d iterations (%d exemplars)",
            max_iter,
            exemplar_indices.size,
        )

    # argmax over columns ordered by ascending exemplar index: similarity
    # ties resolve toward the lowest exemplar index.
    assignments_raw = exemplar_indices[np.argmax(similarity[:, exemplar_indices], axis=1)]
    assignments_raw[exemplar_indices] = exemplar_indices
    assignments = relabel_by_smallest_member(assignments_raw)
    exemplars = {int(assignments[k]): int(k) for k in exemplar_indices}
    return ClusterSet(
        algorithm=ALGORITHM_AFFINITY_PROPAGATION,
        metric=matrix.metric,
        assignments=assignments,
        params=params,
        exemplars=exemplars,
        converged=converged,
    )


def _split_ranges(n: int, workers: int) -> list[tuple[int, int]]:
    if workers <= 1 or n < 2 * workers:
        return [(0, n)]
    step = (n + workers - 1) // workers
    return [(start, min(start + step, n)) for start in range(0, n, step)]


def _map_ranges(pool, ranges, fn, *args) -> None:
    if pool is None or len(ranges) == 1:
        for start, stop in ranges:
            fn(start, stop, *args)
        return
    futures = [pool.submit(fn, start, stop, *args) for start, stop in ranges]
    for future in futures:
        future.result()


def _update_responsibility_rows(
    start: int,
    stop: int,
    similarity: np.ndarray,
    availability: np.ndarray,
    out: np.ndarray,
) -> None:
    """r(i,k) = s(i,k) - max_{k' != k} (a(i,k') + s(i,k')) for rows [start, stop)."""
    combined = availability[start:stop] + similarity[start:stop]
    rows = np.arange(stop - start)
    best_cols = np.argmax(combined, axis=1)
    best = combined[rows, best_cols]
    combined[rows, best_cols] = -np.inf
    second = np.max(combined, axis=1)
    block = similarity[start:stop] - best[:, None]
    block[rows, best_cols] = similarity[start:stop][rows, best_cols] - second
    out[start:stop] = block


def _update_availability_cols(start: int, stop: int, positive: np.ndarray, out: np.ndarray) -> None:
    """a(i,k) = min(0, r(k,k) + sum of other positive responsibilities) for cols [start, stop)."""
    n = positive.shape[0]
    cols = np.arange(start, stop)
    column_sums = positive[:, start:stop].sum(axis=0)
    block = column_sums[None, :] - positive[:, start:stop]
    self_availability = block[cols, cols - start].copy()
    np.minimum(block, 0.0, out=block)
    block[cols, cols - start] = self_availability
    out[:, start:stop] = block
