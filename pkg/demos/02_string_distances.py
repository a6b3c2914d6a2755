"""
Six string distance metrics on one scale
========================================

Every metric is exposed twice: the raw form (edit counts, similarities) and
a normalized [0, 1] distance so that one clustering layer can consume any of
them. This script compares how the metrics see the same pairs and builds a
small distance matrix.
"""

import numpy as np

from ontoalign import (
    DistanceMetricId,
    build_distance_matrix,
    damerau_levenshtein,
    jaro_winkler,
    levenshtein,
    normalized_distance,
)

pairs = [
    ("tumor region", "tumor site"),
    ("tumor region", "region tumor"),
    ("sample depth", "sample depht"),   # transposition typo
    ("lat long", "latitude longitude"),
]

print("raw values:")
for a, b in pairs:
    print(
        f"  {a!r} vs {b!r}: lev={levenshtein(a, b)}"
        f" damerau={damerau_levenshtein(a, b)}"
        f" jaro_winkler={jaro_winkler(a, b):.4f}"
    )

print("\nnormalized distances (0 = identical, 1 = unrelated):")
metrics = [m for m in DistanceMetricId if m is not DistanceMetricId.COSINE_EMBEDDING]
header = " ".join(f"{m.value:>19}" for m in metrics)
print(f"  {'pair':<38}{header}")
for a, b in pairs:
    row = " ".join(f"{normalized_distance(m, a, b):>19.4f}" for m in metrics)
    print(f"  {a + ' / ' + b:<38}{row}")

# The full pairwise matrix is stored as a float32 lower triangle and can be
# persisted in a compact binary format (see DistanceMatrix.save / .load).
names = ["tumor region", "tumor site", "region tumor", "sample depth", "sample depht"]
matrix = build_distance_matrix(names, DistanceMetricId.JARO_WINKLER)
print(f"\n{matrix.n}x{matrix.n} Jaro-Winkler distance matrix:")
with np.printoptions(precision=3, suppress=True):
    print(matrix.to_square())
