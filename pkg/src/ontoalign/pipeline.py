"""End-to-end pipeline: normalize, distances, cluster, embed, align, report.

Every stage writes its artifact through a ``.partial`` temp name and renames
on success, so an aborted run leaves only ``.partial`` files behind. Given
identical inputs and configuration the artifacts are byte-identical across
runs; the report records a sha256 per artifact to make that checkable.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass, fields as dataclass_fields
from pathlib import Path
from typing import Callable, Optional, Union

if sys.version_info >= (3, 11):  # pragma: no cover - version shim
    import tomllib
else:  # pragma: no cover - version shim
    import tomli as tomllib

from . import cluster as clustering
from .align import (
    EDIT_METRIC_JARO_WINKLER,
    EDIT_METRIC_LEVENSHTEIN,
    align as align_fields,
    cluster_neighbors,
    coverage_report,
    recommend_clusters,
)
from .corpus import build_corpus, load_corpus_csv, read_raw_field_names, save_corpus_csv
from .distance import DistanceMatrix, DistanceMetricId, build_distance_matrix
from .embedding import (
    EmbeddingStore,
    embed_corpus,
    load_embeddings,
    load_idf,
    load_word_vectors,
    save_embeddings,
)
from .errors import AllNoise, ConfigError, StageError
from .ontology import load_term_table

logger = logging.getLogger(__name__)

ARTIFACT_CORPUS = "corpus.csv"
ARTIFACT_DISTANCES = "distances.bin"
ARTIFACT_CLUSTERS = "clusters.json"
ARTIFACT_FIELD_EMBEDDINGS = "field_embeddings.bin"
ARTIFACT_TERM_EMBEDDINGS = "term_embeddings.bin"
ARTIFACT_ALIGNMENTS = "alignments.json"
ARTIFACT_REPORT = "report.json"


@dataclass
class RunConfig:
    """Everything a pipeline run needs, loadable from a flat TOML file."""

    corpus: Path
    vectors: Path
    idf: Path
    terms: Path
    out_dir: Path
    column: Optional[str] = None
    metric: DistanceMetricId = DistanceMetricId.JARO_WINKLER
    algorithm: str = clustering.ALGORITHM_AFFINITY_PROPAGATION
    damping: float = 0.9
    max_iter: int = 1000
    convergence_iter: int = 50
    preference: Optional[float] = None
    eps: float = 0.25
    min_pts: int = 2
    min_cluster_size: int = 2
    min_samples: int = 1
    threshold_r: float = 0.85
    top_k: int = 10
    cosine_floor: Optional[float] = None
    edit_metric: str = EDIT_METRIC_LEVENSHTEIN
    workers: int = 1
    config_text: str = ""  # verbatim TOML, echoed into artifacts

    _PATH_KEYS = ("corpus", "vectors", "idf", "terms", "out_dir")

    @classmethod
    def from_toml(cls, path: Union[str, Path]) -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
            raw = tomllib.loads(text)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML in {path}: {exc}") from None
        known = {f.name for f in dataclass_fields(cls)} - {"config_text"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        missing = [key for key in ("corpus", "vectors", "idf", "terms", "out_dir") if key not in raw]
        if missing:
            raise ConfigError(f"missing required config keys: {', '.join(missing)}")
        values = dict(raw)
        for key in cls._PATH_KEYS:
            values[key] = (path.parent / values[key]).resolve()
        if "metric" in values:
            try:
                values["metric"] = DistanceMetricId(values["metric"])
            except ValueError:
                raise ConfigError(f"unknown metric {values['metric']!r}") from None
        config = cls(config_text=text, **values)
        config.check()
        return config

    def check(self) -> None:
        if self.algorithm not in (
            clustering.ALGORITHM_AFFINITY_PROPAGATION,
            clustering.ALGORITHM_DBSCAN,
            clustering.ALGORITHM_HDBSCAN,
        ):
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.edit_metric not in (
            EDIT_METRIC_LEVENSHTEIN,
            EDIT_METRIC_JARO_WINKLER,
        ):
            raise ConfigError(f"unknown edit metric {self.edit_metric!r}")
        if not 0.0 < self.threshold_r < 1.0:
            raise ConfigError(f"threshold_r must be in (0, 1), got {self.threshold_r}")

    def validate_inputs(self) -> None:
        """Check every referenced input exists, naming the stage that needs it."""
        requirements = [
            ("normalize", self.corpus),
            ("embed", self.vectors),
            ("embed", self.idf),
            ("embed", self.terms),
        ]
        for stage, input_path in requirements:
            if not Path(input_path).is_file():
                raise ConfigError(f"input for stage '{stage}' does not exist: {input_path}")

    def params_payload(self) -> dict:
        """The provenance record stitched into every JSON artifact."""
        payload = {
            "metric": self.metric.value,
            "algorithm": self.algorithm,
            "threshold_r": self.threshold_r,
            "top_k": self.top_k,
            "cosine_floor": self.cosine_floor,
            "edit_metric": self.edit_metric,
            "workers": self.workers,
        }
        if self.algorithm == clustering.ALGORITHM_AFFINITY_PROPAGATION:
            payload.update(
                damping=self.damping,
                max_iter=self.max_iter,
                convergence_iter=self.convergence_iter,
                preference=self.preference,
            )
        elif self.algorithm == clustering.ALGORITHM_DBSCAN:
            payload.update(eps=self.eps, min_pts=self.min_pts)
        else:
            payload.update(min_cluster_size=self.min_cluster_size, min_samples=self.min_samples)
        return payload


def _write_artifact(path: Path, writer: Callable[[Path], None]) -> None:
    """Write through a .partial name; only a completed write gets renamed."""
    partial = path.with_name(path.name + ".partial")
    writer(partial)
    os.replace(partial, path)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _dump_json(payload: dict, path: Path) -> None:
    with path.open("w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def run_pipeline(config: RunConfig, validate_inputs: bool = True) -> dict:
    """Execute all stages, writing artifacts into ``config.out_dir``.

    Returns the run report (also written as report.json). Raises ConfigError
    for invalid configuration or missing inputs, StageError when a stage
    fails mid-run.
    """
    if validate_inputs:
        config.validate_inputs()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def stage(name: str, fn: Callable[[], object]) -> object:
        try:
            result = fn()
            logger.info("stage %s done", name)
            return result
        except (ConfigError, StageError):
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc

    def do_normalize() -> list:
        raws = read_raw_field_names(config.corpus, config.column)
        corpus = build_corpus(raws)
        _write_artifact(out_dir / ARTIFACT_CORPUS, lambda p: save_corpus_csv(corpus, p))
        return corpus

    corpus = stage("normalize", do_normalize)

    def make_store() -> EmbeddingStore:
        return EmbeddingStore(load_word_vectors(config.vectors), load_idf(config.idf))

    def do_distances():
        store = make_store() if config.metric is DistanceMetricId.COSINE_EMBEDDING else None
        matrix = build_distance_matrix(corpus, config.metric, store, workers=config.workers)
        _write_artifact(out_dir / ARTIFACT_DISTANCES, matrix.save)
        return matrix

    stage("distances", do_distances)

    def do_cluster():
        matrix = DistanceMatrix.load(out_dir / ARTIFACT_DISTANCES)
        if config.algorithm == clustering.ALGORITHM_AFFINITY_PROPAGATION:
            result = clustering.affinity_propagation(
                matrix,
                damping=config.damping,
                max_iter=config.max_iter,
                convergence_iter=config.convergence_iter,
                preference=config.preference,
                workers=config.workers,
            )
        elif config.algorithm == clustering.ALGORITHM_DBSCAN:
            result = clustering.dbscan(matrix, eps=config.eps, min_pts=config.min_pts)
        else:
            result = clustering.hdbscan(
                matrix,
                min_cluster_size=config.min_cluster_size,
                min_samples=config.min_samples,
            )
        _write_artifact(out_dir / ARTIFACT_CLUSTERS, lambda p: clustering.save_clusters(result, p))
        return result

    stage("cluster", do_cluster)

    def do_embed():
        store = make_store()
        field_embeddings = embed_corpus(
            [f.normalized for f in corpus], store.vectors, store.idf, workers=config.workers
        )
        _write_artifact(
            out_dir / ARTIFACT_FIELD_EMBEDDINGS, lambda p: save_embeddings(field_embeddings, p)
        )
        index = load_term_table(config.terms)
        term_embeddings = embed_corpus(
            [t.normalized_label for t in index.terms], store.vectors, store.idf, workers=config.workers
        )
        _write_artifact(
            out_dir / ARTIFACT_TERM_EMBEDDINGS, lambda p: save_embeddings(term_embeddings, p)
        )

    stage("embed", do_embed)

    def do_align() -> dict:
        saved_corpus = load_corpus_csv(out_dir / ARTIFACT_CORPUS)
        clusters = clustering.load_clusters(out_dir / ARTIFACT_CLUSTERS)
        matrix = DistanceMatrix.load(out_dir / ARTIFACT_DISTANCES)
        index = load_term_table(config.terms)
        field_embeddings = load_embeddings(out_dir / ARTIFACT_FIELD_EMBEDDINGS)
        term_embeddings = load_embeddings(out_dir / ARTIFACT_TERM_EMBEDDINGS)
        amap = align_fields(
            saved_corpus,
            field_embeddings,
            index,
            term_embeddings,
            r=config.threshold_r,
            top_k=config.top_k,
            edit_metric=config.edit_metric,
            cosine_floor=config.cosine_floor,
            workers=config.workers,
        )
        recommendations = recommend_clusters(clusters, amap, index)
        try:
            coverage = coverage_report(clusters, amap, index).__dict__
        except AllNoise:
            coverage = None
        neighbors = cluster_neighbors(clusters, matrix, k=3)
        payload = {
            "fields": [
                {
                    "index": f.index,
                    "normalized": f.normalized,
                    "candidates": [
                        {
                            "iri": index.terms[c.term_ref].iri,
                            "label": index.terms[c.term_ref].label,
                            "ontology_id": index.terms[c.term_ref].ontology_id,
                            "co_sim": c.co_sim,
                            "edit_sim": c.edit_sim,
                            "combined": c.combined,
                        }
                        for c in amap.per_field[f.index]
                    ],
                    "neighbors": [
                        {
                            "index": j,
                            "normalized": saved_corpus[j].normalized,
                            "distance": dist,
                            "top_candidates": [
                                index.terms[c.term_ref].iri for c in amap.per_field[j][:3]
                            ],
                        }
                        for j, dist in neighbors[f.index]
                    ],
                }
                for f in saved_corpus
            ],
            "recommendations": [
                None
                if rec is None
                else {
                    "cluster_id": rec.cluster_id,
                    "ontology_id": rec.ontology_id,
                    "covered_count": rec.covered_count,
                    "covered_fields": sorted(rec.covered_fields),
                }
                for rec in recommendations
            ],
            "coverage": coverage,
            "params": config.params_payload(),
        }
        _write_artifact(out_dir / ARTIFACT_ALIGNMENTS, lambda p: _dump_json(payload, p))
        return payload

    alignments = stage("align", do_align)

    def do_report() -> dict:
        clusters = clustering.load_clusters(out_dir / ARTIFACT_CLUSTERS)
        try:
            stats = clustering.cluster_stats(clusters).__dict__
        except AllNoise:
            stats = None
        artifact_names = [
            ARTIFACT_CORPUS,
            ARTIFACT_DISTANCES,
            ARTIFACT_CLUSTERS,
            ARTIFACT_FIELD_EMBEDDINGS,
            ARTIFACT_TERM_EMBEDDINGS,
            ARTIFACT_ALIGNMENTS,
        ]
        payload = {
            "params": config.params_payload(),
            "config_text": config.config_text,
            "corpus_size": len(corpus),
            "cluster_stats": stats,
            "converged": clusters.converged,
            "coverage": alignments["coverage"],
            "aligned_fields": sum(1 for f in alignments["fields"] if f["candidates"]),
            "artifacts": {name: _sha256(out_dir / name) for name in artifact_names},
        }
        _write_artifact(out_dir / ARTIFACT_REPORT, lambda p: _dump_json(payload, p))
        return payload

    return stage("report", do_report)
