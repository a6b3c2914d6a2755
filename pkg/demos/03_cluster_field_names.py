"""
Clustering field names from a distance matrix
=============================================

Three clustering methods, none of which needs the number of clusters up
front: affinity propagation (exemplar-based message passing), DBSCAN
(density components), and HDBSCAN (stability-selected hierarchy). All
consume the same precomputed distance matrix.
"""

from ontoalign import (
    DistanceMetricId,
    affinity_propagation,
    build_distance_matrix,
    cluster_stats,
    dbscan,
    hdbscan,
)

# Three families of field names plus one oddball.
names = [
    "tumor region", "tumor regions", "region of tumor", "tumour region",
    "sample depth", "sample depth m", "depth of sample",
    "geo location", "geolocation", "geographic location",
    "isolate id",
]
matrix = build_distance_matrix(names, DistanceMetricId.JARO_WINKLER)


def show(title, result):
    print(f"\n{title} (converged={result.converged})")
    for cluster_id, members in enumerate(result.clusters()):
        exemplar = ""
        if result.exemplars and cluster_id in result.exemplars:
            exemplar = f"   exemplar: {names[result.exemplars[cluster_id]]!r}"
        print(f"  cluster {cluster_id}: {[names[i] for i in members]}{exemplar}")
    if result.noise():
        print(f"  noise: {[names[i] for i in result.noise()]}")
    try:
        stats = cluster_stats(result)
        print(
            f"  stats: {stats.num_clusters} clusters,"
            f" avg {stats.avg_size:.1f}, median {stats.median_size:.1f},"
            f" biggest {stats.biggest}, smallest {stats.smallest}"
        )
    except Exception as exc:
        print(f"  stats: {exc}")


show("affinity propagation", affinity_propagation(matrix))
show("dbscan eps=0.25 min_pts=2", dbscan(matrix, eps=0.25, min_pts=2))
show("hdbscan min_cluster_size=2", hdbscan(matrix, min_cluster_size=2, min_samples=1))
