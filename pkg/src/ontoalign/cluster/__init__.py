"""Clustering of field names over a precomputed distance matrix.

Three algorithms are provided, none of which needs the number of clusters
up front: affinity propagation, DBSCAN, and HDBSCAN. All three return a
:class:`ClusterSet` whose cluster ids are relabeled so that cluster 0
contains the smallest member index, cluster 1 the next, and so on; density
methods mark unclustered points with the noise id ``-1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..distance import DistanceMetricId
from ..errors import AllNoise, FormatError

NOISE = -1

ALGORITHM_AFFINITY_PROPAGATION = "affinity_propagation"
ALGORITHM_DBSCAN = "dbscan"
ALGORITHM_HDBSCAN = "hdbscan"


@dataclass
class ClusterSet:
    """Disjoint assignment of corpus indices to clusters."""

    algorithm: str
    metric: Optional[DistanceMetricId]
    assignments: np.ndarray  # int64 per index; NOISE for unclustered points
    params: dict
    exemplars: Optional[dict[int, int]] = None  # cluster id -> exemplar index
    converged: bool = True

    def __post_init__(self) -> None:
        self.assignments = np.asarray(self.assignments, dtype=np.int64)

    @property
    def n(self) -> int:
        return int(self.assignments.shape[0])

    def num_clusters(self) -> int:
        labels = self.assignments[self.assignments != NOISE]
        return int(labels.max()) + 1 if labels.size else 0

    def clusters(self) -> list[list[int]]:
        """Member lists per cluster id, each sorted ascending."""
        out: list[list[int]] = [[] for _ in range(self.num_clusters())]
        for index, label in enumerate(self.assignments):
            if label != NOISE:
                out[int(label)].append(index)
        return out

    def noise(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.assignments == NOISE)]


@dataclass(frozen=True)
class ClusterStats:
    """The seven cluster-size summary columns, over non-noise clusters."""

    num_clusters: int
    avg_size: float
    median_size: float
    std_dev_size: float
    biggest: int
    smallest: int
    num_smallest: int


def relabel_by_smallest_member(assignments: np.ndarray) -> np.ndarray:
    """Renumber cluster ids by ascending smallest member index.

    Noise entries pass through. This is the canonical labeling every
    algorithm applies before returning, making outputs comparable across
    runs and worker counts.
    """
    assignments = np.asarray(assignments, dtype=np.int64)
    order: dict[int, int] = {}
    for label in assignments:
        label = int(label)
        if label != NOISE and label not in order:
            order[label] = len(order)
    out = np.full(assignments.shape, NOISE, dtype=np.int64)
    for position, label in enumerate(assignments):
        if label != NOISE:
            out[position] = order[int(label)]
    return out


def cluster_stats(cs: ClusterSet) -> ClusterStats:
    """Compute the summary statistics over non-noise cluster sizes.

    The standard deviation is the population standard deviation. Raises
    AllNoise when there are no clusters at all.
    """
    sizes = sorted(len(members) for members in cs.clusters())
    if not sizes:
        raise AllNoise("no non-noise clusters to summarize")
    count = len(sizes)
    avg = sum(sizes) / count
    mid = count // 2
    median = float(sizes[mid]) if count % 2 else (sizes[mid - 1] + sizes[mid]) / 2.0
    variance = sum((s - avg) ** 2 for s in sizes) / count
    smallest = sizes[0]
    return ClusterStats(
        num_clusters=count,
        avg_size=avg,
        median_size=median,
        std_dev_size=math.sqrt(variance),
        biggest=sizes[-1],
        smallest=smallest,
        num_smallest=sum(1 for s in sizes if s == smallest),
    )


def save_clusters(cs: ClusterSet, path: Union[str, Path]) -> None:
    """Write a ClusterSet as JSON (clusters, noise, params, stats)."""
    try:
        stats = cluster_stats(cs).__dict__
    except AllNoise:
        stats = None
    payload = {
        "algorithm": cs.algorithm,
        "metric": cs.metric.value if cs.metric is not None else None,
        "params": cs.params,
        "converged": cs.converged,
        "clusters": cs.clusters(),
        "noise": cs.noise(),
        "exemplars": (
            {str(k): v for k, v in sorted(cs.exemplars.items())} if cs.exemplars else None
        ),
        "stats": stats,
    }
    with Path(path).open("w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def load_clusters(path: Union[str, Path]) -> ClusterSet:
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        payload = json.load(handle)
    try:
        members = payload["clusters"]
        noise = payload["noise"]
        n = sum(len(m) for m in members) + len(noise)
        assignments = np.full(n, NOISE, dtype=np.int64)
        for cluster_id, indices in enumerate(members):
            for index in indices:
                assignments[index] = cluster_id
        exemplars = payload.get("exemplars")
        return ClusterSet(
            algorithm=payload["algorithm"],
            metric=DistanceMetricId(payload["metric"]) if payload.get("metric") else None,
            assignments=assignments,
            params=payload.get("params", {}),
            exemplars={int(k): v for k, v in exemplars.items()} if exemplars else None,
            converged=payload.get("converged", True),
        )
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed cluster file {path}: {exc}") from exc


from .affinity import affinity_propagation  # noqa: E402
from .density import dbscan  # noqa: E402
from .hierarchy import hdbscan  # noqa: E402

__all__ = [
    "NOISE",
    "ALGORITHM_AFFINITY_PROPAGATION",
    "ALGORITHM_DBSCAN",
    "ALGORITHM_HDBSCAN",
    "ClusterSet",
    "ClusterStats",
    "affinity_propagation",
    "cluster_stats",
    "dbscan",
    "hdbscan",
    "load_clusters",
    "relabel_by_smallest_member",
    "save_clusters",
]
