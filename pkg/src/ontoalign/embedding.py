"""Word-vector and IDF tables, and IDF-weighted term embeddings.

A term embedding is the IDF-weighted mean of the word vectors of the tokens
in a label. Out-of-vocabulary words fall back to a default vector (the
componentwise mean of the vocabulary) and a default IDF weight of 0.01.
Tokens are accumulated in sorted order so that embeddings are bit-identical
for labels that differ only in word order.
"""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import EmptyLabel, FormatError

logger = logging.getLogger(__name__)

DEFAULT_OOV_IDF = 0.01

EMBEDDINGS_MAGIC = b"OAEM"
EMBEDDINGS_VERSION = 1
_EMBEDDINGS_HEADER = struct.Struct("<4sHQI")  # magic, version, count, dimension


@dataclass
class WordVectorTable:
    """Pretrained word vectors plus the default vector for unknown words."""

    dimension: int
    entries: dict[str, np.ndarray]
    default_vector: np.ndarray

    def vector(self, word: str) -> np.ndarray:
        return self.entries.get(word, self.default_vector)


@dataclass
class IdfTable:
    """Inverse-document-frequency weights, all strictly positive."""

    entries: dict[str, float] = field(default_factory=dict)
    default_idf: float = DEFAULT_OOV_IDF

    def weight(self, word: str) -> float:
        return self.entries.get(word, self.default_idf)


@dataclass(frozen=True)
class TermEmbedding:
    """A dense vector for one field name or ontology-term label."""

    term_label: str
    vector: np.ndarray


def load_word_vectors(path: Union[str, Path]) -> WordVectorTable:
    """Load a text word-vector file (one ``word v1 v2 ... vd`` line per word).

    The dimension is inferred from the first line and enforced on the rest.
    A repeated word overwrites the earlier entry with a warning. The default
    vector for out-of-vocabulary words is the componentwise mean of all
    loaded vectors.
    """
    path = Path(path)
    entries: dict[str, np.ndarray] = {}
    dimension: Optional[int] = None
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            parts = line.split()
            if not parts:
                continue
            word, components = parts[0], parts[1:]
            if dimension is None:
                if not components:
                    raise FormatError("no vector components on first entry", line=lineno)
                dimension = len(components)
            elif len(components) != dimension:
                raise FormatError(
                    f"expected {dimension} components, got {len(components)}", line=lineno
                )
            try:
                vector = np.array([float(c) for c in components], dtype=np.float64)
            except ValueError as exc:
                raise FormatError(f"non-numeric vector component ({exc})", line=lineno) from None
            if not np.all(np.isfinite(vector)):
                raise FormatError("non-finite vector component", line=lineno)
            if word in entries:
                logger.warning("duplicate word %r at line %d; keeping the later entry", word, lineno)
            entries[word] = vector
    if dimension is None or not entries:
        raise FormatError(f"no word vectors found in {path}")
    default = np.mean(np.stack(list(entries.values())), axis=0)
    return WordVectorTable(dimension=dimension, entries=entries, default_vector=default)


def save_word_vectors(table: WordVectorTable, path: Union[str, Path]) -> None:
    """Write a table back to the text vector format (used by fixtures)."""
    with Path(path).open("w", encoding="utf-8") as handle:
        for word, vector in table.entries.items():
            handle.write(word + " " + " ".join(repr(float(v)) for v in vector) + "\n")


def compute_idf(
    corpus_docs: Iterable[Sequence[str]], min_doc_freq: int = 5
) -> IdfTable:
    """Compute IDF statistics from a stream of tokenized documents.

    ``df(w)`` counts documents containing ``w`` at least once; words below
    ``min_doc_freq`` are dropped. ``idf(w) = ln(D / df(w))``, with words
    present in every document floored to ``ln(D / (D - 0.5))`` so every
    weight stays positive.
    """
    df: dict[str, int] = {}
    total = 0
    for doc in corpus_docs:
        total += 1
        for word in set(doc):
            df[word] = df.get(word, 0) + 1
    entries: dict[str, float] = {}
    for word, count in df.items():
        if count < min_doc_freq:
            continue
        if count >= total:
            entries[word] = math.log(total / (total - 0.5))
        else:
            entries[word] = math.log(total / count)
    return IdfTable(entries=entries)


def load_idf(path: Union[str, Path]) -> IdfTable:
    """Load a two-column TSV of ``word<TAB>idf`` weights."""
    path = Path(path)
    entries: dict[str, float] = {}
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(f"expected 2 tab-separated columns, got {len(parts)}", line=lineno)
            try:
                value = float(parts[1])
            except ValueError:
                raise FormatError(f"non-numeric idf {parts[1]!r}", line=lineno) from None
            if not value > 0:
                raise FormatError(f"idf must be positive, got {value}", line=lineno)
            entries[parts[0]] = value
    return IdfTable(entries=entries)


def save_idf(table: IdfTable, path: Union[str, Path]) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for word, value in table.entries.items():
            handle.write(f"{word}\t{value!r}\n")


def term_embedding(label: str, vectors: WordVectorTable, idf: IdfTable) -> TermEmbedding:
    """Embed one label as the IDF-weighted mean of its word vectors.

    Out-of-vocabulary words contribute the table's default vector with the
    default IDF weight. Accumulation runs over the sorted tokens, which makes
    the result independent of word order down to the last bit.
    """
    tokens = label.split()
    if not tokens:
        raise EmptyLabel(f"label {label!r} has no tokens")
    weights: list[float] = []
    parts: list[np.ndarray] = []
    for word in sorted(tokens):
        vector = vectors.entries.get(word)
        if vector is None:
            vector = vectors.default_vector
            weights.append(idf.default_idf)
        else:
            weights.append(idf.weight(word))
        parts.append(vector)
    total = sum(weights)
    # Accumulate with pre-normalized weights: a single-token label comes back
    # as exactly its word vector ((w / w) * v), with no double rounding.
    out = np.zeros(vectors.dimension, dtype=np.float64)
    for weight, vector in zip(weights, parts):
        out += (weight / total) * vector
    return TermEmbedding(term_label=label, vector=out)


def embed_corpus(
    labels: Sequence[str],
    vectors: WordVectorTable,
    idf: IdfTable,
    workers: int = 1,
) -> list[TermEmbedding]:
    """Embed every label, preserving order.

    The result is identical for any worker count; an EmptyLabel error is
    re-raised with the offending position attached.
    """

    def embed_one(position: int, label: str) -> TermEmbedding:
        try:
            return term_embedding(label, vectors, idf)
        except EmptyLabel as exc:
            raise EmptyLabel(f"label at index {position}: {exc}") from None

    if workers <= 1 or len(labels) < 2:
        return [embed_one(i, label) for i, label in enumerate(labels)]
    from concurrent.futures import ThreadPoolExecutor

    out: list[Optional[TermEmbedding]] = [None] * len(labels)

    def run_range(start: int, stop: int) -> None:
        for i in range(start, stop):
            out[i] = embed_one(i, labels[i])

    step = (len(labels) + workers - 1) // workers
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(run_range, start, min(start + step, len(labels)))
            for start in range(0, len(labels), step)
        ]
        for future in futures:
            future.result()
    return out  # type: ignore[return-value]


class EmbeddingStore:
    """Word vectors plus IDF weights, with per-label embedding caching.

    This is the handle passed to the cosine string-distance metric and to
    the aligner; both only need "give me the vector for this label".
    """

    def __init__(self, vectors: WordVectorTable, idf: IdfTable) -> None:
        self.vectors = vectors
        self.idf = idf
        self._cache: dict[str, np.ndarray] = {}

    @property
    def dimension(self) -> int:
        return self.vectors.dimension

    def embedding(self, label: str) -> np.ndarray:
        cached = self._cache.get(label)
        if cached is None:
            cached = term_embedding(label, self.vectors, self.idf).vector
            self._cache[label] = cached
        return cached


def save_embeddings(embeddings: Sequence[TermEmbedding], path: Union[str, Path]) -> None:
    """Persist embeddings in the binary format (little-endian).

    Header: magic ``OAEM``, version u16, count u64, dimension u32. Then per
    term: u32 label byte length, UTF-8 label, ``dimension`` f32 components.
    """
    if not embeddings:
        raise ValueError("refusing to write an empty embedding file")
    dim = embeddings[0].vector.shape[0]
    with Path(path).open("wb") as handle:
        handle.write(_EMBEDDINGS_HEADER.pack(EMBEDDINGS_MAGIC, EMBEDDINGS_VERSION, len(embeddings), dim))
        for emb in embeddings:
            if emb.vector.shape[0] != dim:
                raise ValueError("inconsistent embedding dimensions")
            encoded = emb.term_label.encode("utf-8")
            handle.write(struct.pack("<I", len(encoded)))
            handle.write(encoded)
            handle.write(np.asarray(emb.vector, dtype="<f4").tobytes())


def load_embeddings(path: Union[str, Path]) -> list[TermEmbedding]:
    """Load embeddings written by :func:`save_embeddings`.

    Vectors come back as float64 (exact widening of the stored f32 values).
    """
    path = Path(path)
    with path.open("rb") as handle:
        header = handle.read(_EMBEDDINGS_HEADER.size)
        if len(header) != _EMBEDDINGS_HEADER.size:
            raise FormatError(f"truncated embedding file {path}")
        magic, version, count, dim = _EMBEDDINGS_HEADER.unpack(header)
        if magic != EMBEDDINGS_MAGIC:
            raise FormatError(f"bad magic {magic!r} in {path}")
        if version != EMBEDDINGS_VERSION:
            raise FormatError(f"unsupported embedding file version {version}")
        out: list[TermEmbedding] = []
        for _ in range(count):
            (label_len,) = struct.unpack("<I", handle.read(4))
            label = handle.read(label_len).decode("utf-8")
            raw = handle.read(4 * dim)
            if len(raw) != 4 * dim:
                raise FormatError(f"truncated embedding record in {path}")
            vector = np.frombuffer(raw, dtype="<f4").astype(np.float64)
            out.append(TermEmbedding(term_label=label, vector=vector))
    return out
