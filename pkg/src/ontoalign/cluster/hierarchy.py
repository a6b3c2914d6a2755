"""HDBSCAN over a precomputed distance matrix.

Pipeline: core distances -> mutual reachability -> minimum spanning tree
(deterministic Prim) -> single-linkage merge tree -> condensed tree at
``min_cluster_size`` -> cluster selection by maximum stability (excess of
mass, the root never selected) -> labeling, with unselected points as noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..distance import DistanceMatrix
from . import ALGORITHM_HDBSCAN, NOISE, ClusterSet, relabel_by_smallest_member


def hdbscan(
    matrix: DistanceMatrix,
    min_cluster_size: int = 2,
    min_samples: int = 1,
) -> ClusterSet:
    """Cluster by HDBSCAN.

    The core distance of a point is its distance to the ``min_samples``-th
    nearest point counting the point itself, so ``min_samples=1`` gives core
    distance 0 and reduces the hierarchy to plain single linkage over the
    input distances.
    """
    if min_cluster_size < 2:
        raise ValueError(f"min_cluster_size must be >= 2, got {min_cluster_size}")
    if min_samples < 1:
        raise ValueError(f"min_samples must be >= 1, got {min_samples}")
    n = matrix.n
    params = {"min_cluster_size": min_cluster_size, "min_samples": min_samples}

    if n < min_cluster_size:
        return ClusterSet(
            algorithm=ALGORITHM_HDBSCAN,
            metric=matrix.metric,
            assignments=np.full(n, NOISE, dtype=np.int64),
            params=params,
        )

    square = matrix.to_square()
    k = min(min_samples, n) - 1  # column k of the sorted row, self at column 0
    core = np.sort(square, axis=1)[:, k]
    reach = np.maximum(square, np.maximum(core[:, None], core[None, :]))
    np.fill_diagonal(reach, 0.0)

    edges = _prim_mst(reach)
    tree = _single_linkage(edges, n)
    condensed = _condense(tree, n, min_cluster_size)
    selected = _select_by_stability(condensed)

    labels = np.full(n, NOISE, dtype=np.int64)
    for point, cluster in enumerate(condensed.point_cluster):
        node = cluster
        while node is not None:
            if node in selected:
                labels[point] = node
                break
            node = condensed.parent.get(node)
    return ClusterSet(
        algorithm=ALGORITHM_HDBSCAN,
        metric=matrix.metric,
        assignments=relabel_by_smallest_member(labels),
        params=params,
    )


def _prim_mst(reach: np.ndarray) -> list[tuple[int, int, float]]:
    """Minimum spanning tree edges of the mutual-reachability graph.

    Prim's algorithm from node 0; ties pick the lowest index, and an equal
    key never replaces an earlier parent, so the edge set is deterministic.
    """
    n = reach.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    key = np.full(n, np.inf)
    parent = np.zeros(n, dtype=np.int64)
    in_tree[0] = True
    key[:] = reach[0]
    key[0] = np.inf
    edges: list[tuple[int, int, float]] = []
    for _ in range(n - 1):
        nxt = int(np.argmin(np.where(in_tree, np.inf, key)))
        edges.append((int(parent[nxt]), nxt, float(key[nxt])))
        in_tree[nxt] = True
        better = ~in_tree & (reach[nxt] < key)
        key[better] = reach[nxt][better]
        parent[better] = nxt
    return edges


@dataclass
class _LinkageTree:
    """Single-linkage merge tree: internal nodes n .. 2n-2 in merge order."""

    left: list[int]
    right: list[int]
    distance: list[float]
    size: list[int]


def _single_linkage(edges: list[tuple[int, int, float]], n: int) -> _LinkageTree:
    order = sorted(edges, key=lambda e: (e[2], min(e[0], e[1]), max(e[0], e[1])))
    root_of = list(range(2 * n - 1))
    size = [1] * n
    tree = _LinkageTree(left=[], right=[], distance=[], size=[])

    def find(x: int) -> int:
        while root_of[x] != x:
            root_of[x] = root_of[root_of[x]]
            x = root_of[x]
        return x

    next_node = n
    for u, v, weight in order:
        ru, rv = find(u), find(v)
        left, right = (ru, rv) if ru < rv else (rv, ru)
        tree.left.append(left)
        tree.right.append(right)
        tree.distance.append(weight)
        merged = (size[left] if left < n else tree.size[left - n]) + (
            size[right] if right < n else tree.size[right - n]
        )
        tree.size.append(merged)
        root_of[ru] = root_of[rv] = next_node
        next_node += 1
    return tree


def _lam(distance: float) -> float:
    return 1.0 / distance if distance > 0.0 else math.inf


def _gap(fall: float, birth: float) -> float:
    if math.isinf(fall) and math.isinf(birth):
        return 0.0
    return fall - birth


@dataclass
class _CondensedTree:
    """Clusters that survive the min-cluster-size filter, plus fall-outs."""

    parent: dict[int, int | None] = field(default_factory=dict)  # cluster -> parent
    birth: dict[int, float] = field(default_factory=dict)  # cluster -> birth lambda
    children: dict[int, list[tuple[int, float, int]]] = field(default_factory=dict)
    fallouts: dict[int, list[tuple[int, float]]] = field(default_factory=dict)
    point_cluster: list[int] = field(default_factory=list)  # point -> cluster it fell from
    root: int = 0


def _condense(tree: _LinkageTree, n: int, min_cluster_size: int) -> _CondensedTree:
    def node_size(node: int) -> int:
        return 1 if node < n else tree.size[node - n]

    def leaves(node: int) -> list[int]:
        out: list[int] = []
        stack = [node]
        while stack:
            current = stack.pop()
            if current < n:
                out.append(current)
            else:
                stack.append(tree.left[current - n])
                stack.append(tree.right[current - n])
        return out

    condensed = _CondensedTree()
    root_node = 2 * n - 2
    condensed.parent[0] = None
    condensed.birth[0] = 0.0
    condensed.children[0] = []
    condensed.fallouts[0] = []
    condensed.point_cluster = [0] * n
    next_cluster = 1

    stack: list[tuple[int, int]] = [(root_node, 0)]
    while stack:
        node, cluster = stack.pop()
        left = tree.left[node - n]
        right = tree.right[node - n]
        lam = _lam(tree.distance[node - n])
        left_big = node_size(left) >= min_cluster_size
        right_big = node_size(right) >= min_cluster_size
        if left_big and right_big:
            for child in (left, right):
                child_cluster = next_cluster
                next_cluster += 1
                condensed.parent[child_cluster] = cluster
                condensed.birth[child_cluster] = lam
                condensed.children[child_cluster] = []
                condensed.fallouts[child_cluster] = []
                condensed.children[cluster].append((child_cluster, lam, node_size(child)))
                if child >= n:
                    stack.append((child, child_cluster))
                else:  # a single point can never reach min_cluster_size >= 2
                    raise AssertionError("unreachable: leaf cluster")
        elif left_big or right_big:
            small = right if left_big else left
            big = left if left_big else right
            for point in leaves(small):
                condensed.fallouts[cluster].append((point, lam))
                condensed.point_cluster[point] = cluster
            stack.append((big, cluster))
        else:
            for point in leaves(node):
                condensed.fallouts[cluster].append((point, lam))
                condensed.point_cluster[point] = cluster
    return condensed


def _select_by_stability(condensed: _CondensedTree) -> set[int]:
    """Excess-of-mass cluster selection; the root is never selectable."""
    stability: dict[int, float] = {}
    for cluster, birth in condensed.birth.items():
        total = 0.0
        for point, lam in condensed.fallouts[cluster]:
            total += _gap(lam, birth)
        for _, lam, size in condensed.children[cluster]:
            total += _gap(lam, birth) * size
        stability[cluster] = total

    selected: set[int] = set()
    subtree: dict[int, float] = {}
    for cluster in sorted(condensed.birth, reverse=True):
        if condensed.parent[cluster] is None:  # root
            continue
        child_sum = sum(subtree[child] for child, _, _ in condensed.children[cluster])
        if condensed.children[cluster] and child_sum > stability[cluster]:
            subtree[cluster] = child_sum
        else:
            selected.add(cluster)
            _deselect_descendants(condensed, cluster, selected)
            subtree[cluster] = stability[cluster]
    return selected


def _deselect_descendants(condensed: _CondensedTree, cluster: int, selected: set[int]) -> None:
    stack = [child for child, _, _ in condensed.children[cluster]]
    while stack:
        current = stack.pop()
        selected.discard(current)
        stack.extend(child for child, _, _ in condensed.children[current])
