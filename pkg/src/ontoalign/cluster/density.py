"""DBSCAN over a precomputed distance matrix.

Core points have at least ``min_pts`` neighbors within ``eps`` (the point
itself included); clusters are the density-connected components of the core
points, with border points attached deterministically to the cluster of the
lowest-index core within range. Everything else is noise.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from ..distance import DistanceMatrix
from . import ALGORITHM_DBSCAN, NOISE, ClusterSet, relabel_by_smallest_member


def dbscan(matrix: DistanceMatrix, eps: float, min_pts: int) -> ClusterSet:
    """Cluster by DBSCAN with neighborhoods ``d(p, q) <= eps``."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if min_pts < 1:
        raise ValueError(f"min_pts must be >= 1, got {min_pts}")
    n = matrix.n
    square = matrix.to_square()
    within = square <= eps
    counts = within.sum(axis=1)  # diagonal is 0 <= eps, so self is included
    core = counts >= min_pts

    labels = np.full(n, NOISE, dtype=np.int64)
    next_label = 0
    for seed in range(n):
        if not core[seed] or labels[seed] != NOISE:
            continue
        queue = deque([seed])
        labels[seed] = next_label
        while queue:
            point = queue.popleft()
            for neighbor in np.flatnonzero(within[point]):
                if core[neighbor] and labels[neighbor] == NOISE:
                    labels[neighbor] = next_label
                    queue.append(neighbor)
        next_label += 1

    # Border points: non-core within eps of some core; take the cluster of
    # the lowest-index such core.
    for point in range(n):
        if core[point] or labels[point] != NOISE:
            continue
        core_neighbors = np.flatnonzero(within[point] & core)
        if core_neighbors.size:
            labels[point] = labels[core_neighbors[0]]

    return ClusterSet(
        algorithm=ALGORITHM_DBSCAN,
        metric=matrix.metric,
        assignments=relabel_by_smallest_member(labels),
        params={"eps": eps, "min_pts": min_pts},
    )
