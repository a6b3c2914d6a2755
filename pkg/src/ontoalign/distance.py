"""Normalized string distances and the pairwise distance matrix.

Six metrics share one [0, 1] scale so a single clustering layer can consume
any of them: edit distances are divided by the longer string length, Jaro
variants are flipped to distances, and the token-Jaccard and embedding-cosine
metrics are already distances.

The matrix is stored as the strict lower triangle (row-major, row ``i``
holding entries ``j < i``) in float32.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import metrics
from .embedding import EmbeddingStore
from .errors import FormatError, MissingStore

MATRIX_MAGIC = b"OADM"
MATRIX_VERSION = 1
_MATRIX_HEADER = struct.Struct("<4sHHQ")  # magic, version, metric id, n


class DistanceMetricId(str, Enum):
    """The six supported string distance metrics."""

    LEVENSHTEIN = "levenshtein"
    DAMERAU_LEVENSHTEIN = "damerau_levenshtein"
    JARO = "jaro"
    JARO_WINKLER = "jaro_winkler"
    JACCARD_TOKENS = "jaccard_tokens"
    COSINE_EMBEDDING = "cosine_embedding"


_METRIC_CODES = {metric: code for code, metric in enumerate(DistanceMetricId)}
_CODE_METRICS = {code: metric for metric, code in _METRIC_CODES.items()}


def _label(name: Union[str, "object"]) -> str:
    """Accept either a FieldName or a plain normalized string."""
    return getattr(name, "normalized", name)  # type: ignore[return-value]


def cosine_embedding_distance(a, b, store: EmbeddingStore) -> float:
    """Cosine distance between the term embeddings of two names.

    Clamped to [0, 1]; names with identical token multisets embed to the
    same vector and are at distance exactly 0.
    """
    from .align import co_sim

    value = 1.0 - co_sim(store.embedding(_label(a)), store.embedding(_label(b)))
    return min(1.0, max(0.0, value))


def normalized_distance(
    metric: DistanceMetricId,
    a,
    b,
    store: Optional[EmbeddingStore] = None,
) -> float:
    """Distance between two names on the shared [0, 1] scale.

    Edit distances are normalized by ``max(|a|, |b|)`` (0 when both strings
    are empty); Jaro and Jaro-Winkler return ``1 - similarity``; the Jaccard
    and cosine metrics pass through.
    """
    sa, sb = _label(a), _label(b)
    if metric is DistanceMetricId.LEVENSHTEIN or metric is DistanceMetricId.DAMERAU_LEVENSHTEIN:
        longest = max(len(sa), len(sb))
        if longest == 0:
            return 0.0
        if metric is DistanceMetricId.LEVENSHTEIN:
            return metrics.levenshtein(sa, sb) / longest
        return metrics.damerau_levenshtein(sa, sb) / longest
    if metric is DistanceMetricId.JARO:
        return 1.0 - metrics.jaro(sa, sb)
    if metric is DistanceMetricId.JARO_WINKLER:
        return 1.0 - metrics.jaro_winkler(sa, sb)
    if metric is DistanceMetricId.JACCARD_TOKENS:
        return metrics.jaccard_tokens(sa, sb)
    if metric is DistanceMetricId.COSINE_EMBEDDING:
        if store is None:
            raise MissingStore("the cosine_embedding metric requires an embedding store")
        return cosine_embedding_distance(sa, sb, store)
    raise ValueError(f"unknown metric {metric!r}")


@dataclass
class DistanceMatrix:
    """Symmetric pairwise distances, stored as the strict lower triangle."""

    n: int
    metric: DistanceMetricId
    values: np.ndarray  # float32, length n*(n-1)//2

    def __post_init__(self) -> None:
        expected = self.n * (self.n - 1) // 2
        self.values = np.asarray(self.values, dtype=np.float32)
        if self.values.shape != (expected,):
            raise ValueError(f"expected {expected} triangular values, got {self.values.shape}")

    @staticmethod
    def tri_index(i: int, j: int) -> int:
        """Offset of pair (i, j), i > j, in the triangular store."""
        if i <= j:
            raise ValueError("tri_index requires i > j")
        return i * (i - 1) // 2 + j

    def get(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        if i < j:
            i, j = j, i
        return float(self.values[self.tri_index(i, j)])

    def to_square(self) -> np.ndarray:
        """Expand to a dense symmetric float64 matrix with a zero diagonal."""
        square = np.zeros((self.n, self.n), dtype=np.float64)
        rows, cols = np.tril_indices(self.n, k=-1)
        square[rows, cols] = self.values
        square[cols, rows] = self.values
        return square

    def save(self, path: Union[str, Path]) -> None:
        """Write the binary matrix file (16-byte header + little-endian f32)."""
        with Path(path).open("wb") as handle:
            handle.write(
                _MATRIX_HEADER.pack(MATRIX_MAGIC, MATRIX_VERSION, _METRIC_CODES[self.metric], self.n)
            )
            handle.write(np.asarray(self.values, dtype="<f4").tobytes())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "DistanceMatrix":
        path = Path(path)
        with path.open("rb") as handle:
            header = handle.read(_MATRIX_HEADER.size)
            if len(header) != _MATRIX_HEADER.size:
                raise FormatError(f"truncated distance matrix file {path}")
            magic, version, code, n = _MATRIX_HEADER.unpack(header)
            if magic != MATRIX_MAGIC:
                raise FormatError(f"bad magic {magic!r} in {path}")
            if version != MATRIX_VERSION:
                raise FormatError(f"unsupported matrix version {version}")
            if code not in _CODE_METRICS:
                raise FormatError(f"unknown metric code {code}")
            expected = n * (n - 1) // 2
            raw = handle.read(4 * expected)
            if len(raw) != 4 * expected:
                raise FormatError(f"expected {expected} values in {path}")
            values = np.frombuffer(raw, dtype="<f4").copy()
        return cls(n=n, metric=_CODE_METRICS[code], values=values)


def build_distance_matrix(
    corpus: Sequence,
    metric: DistanceMetricId,
    store: Optional[EmbeddingStore] = None,
    workers: int = 1,
) -> DistanceMatrix:
    """Compute all pairwise distances for a corpus of field names.

    Rows are distributed over ``workers`` threads; because every cell depends
    only on its own string pair, the result is bitwise identical for any
    worker count.
    """
    labels = [_label(item) for item in corpus]
    n = len(labels)
    if n == 0:
        raise ValueError("corpus must be non-empty")
    if metric is DistanceMetricId.COSINE_EMBEDDING:
        if store is None:
            raise MissingStore("the cosine_embedding metric requires an embedding store")
        for label in labels:  # warm the cache once, outside the row loop
            store.embedding(label)
    values = np.zeros(n * (n - 1) // 2, dtype=np.float32)

    def fill_rows(row_start: int, row_stop: int) -> None:
        for i in range(row_start, row_stop):
            offset = i * (i - 1) // 2
            label_i = labels[i]
            for j in range(i):
                values[offset + j] = normalized_distance(metric, label_i, labels[j], store)

    if workers <= 1 or n < 4:
        fill_rows(0, n)
    else:
        from concurrent.futures import ThreadPoolExecutor

        step = (n + workers - 1) // workers
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(fill_rows, start, min(start + step, n))
                for start in range(0, n, step)
            ]
            for future in futures:
                future.result()
    return DistanceMatrix(n=n, metric=metric, values=values)
