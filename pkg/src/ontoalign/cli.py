"""Command-line entry points for the alignment pipeline.

Exit codes: 0 on success, 2 for configuration and usage errors, 3 for
runtime stage failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import cluster as clustering
from .align import (
    DEFAULT_THRESHOLD,
    DEFAULT_TOP_K,
    EDIT_METRIC_JARO_WINKLER,
    EDIT_METRIC_LEVENSHTEIN,
    align as align_fields,
    cluster_neighbors,
    coverage_report,
    recommend_clusters,
)
from .corpus import build_corpus, load_corpus_csv, read_raw_field_names, save_corpus_csv
from .distance import DistanceMatrix, DistanceMetricId, build_distance_matrix
from .embedding import EmbeddingStore, embed_corpus, load_embeddings, load_idf, load_word_vectors, save_embeddings
from .errors import ConfigError, OntoalignError, StageError
from .ontology import extract_labels_ntriples, load_term_table, save_term_table
from .pipeline import RunConfig, run_pipeline

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STAGE = 3


def _metric_arg(value: str) -> DistanceMetricId:
    try:
        return DistanceMetricId(value)
    except ValueError:
        choices = ", ".join(m.value for m in DistanceMetricId)
        raise argparse.ArgumentTypeError(f"unknown metric {value!r} (choose from {choices})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ontoalign", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="normalize raw field names into a corpus CSV")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--column", help="treat the input as CSV and read this column")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("distances", help="build the pairwise distance matrix")
    p.add_argument("--metric", required=True, type=_metric_arg)
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--vectors", type=Path, help="word vectors (cosine metric only)")
    p.add_argument("--idf", type=Path, help="IDF table (cosine metric only)")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("cluster", help="cluster a distance matrix")
    p.add_argument(
        "--algorithm",
        required=True,
        choices=[
            clustering.ALGORITHM_AFFINITY_PROPAGATION,
            clustering.ALGORITHM_DBSCAN,
            clustering.ALGORITHM_HDBSCAN,
        ],
    )
    p.add_argument("--matrix", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--damping", type=float, default=0.9)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--convergence-iter", type=int, default=50)
    p.add_argument("--preference", type=float)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--min-pts", type=int, default=2)
    p.add_argument("--min-cluster-size", type=int, default=2)
    p.add_argument("--min-samples", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("embed", help="embed corpus or term labels into a binary file")
    p.add_argument("--vectors", required=True, type=Path)
    p.add_argument("--idf", required=True, type=Path)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--labels", type=Path, help="corpus CSV; embeds the normalized column")
    group.add_argument("--terms", type=Path, help="term TSV; embeds the normalized labels")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("ingest", help="extract ontology term labels from N-Triples")
    p.add_argument("--ntriples", required=True, type=Path)
    p.add_argument("--ontology-id", required=True)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--strict", action="store_true", help="abort on the first malformed line")

    p = sub.add_parser("align", help="rank ontology terms for every field name")
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--clusters", required=True, type=Path)
    p.add_argument("--field-embeddings", required=True, type=Path)
    p.add_argument("--term-embeddings", required=True, type=Path)
    p.add_argument("--terms", required=True, type=Path)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--top-k", type=int, default=DEFAULT_TOP_K)
    p.add_argument("--cosine-floor", type=float)
    p.add_argument(
        "--edit-metric",
        choices=[EDIT_METRIC_LEVENSHTEIN, EDIT_METRIC_JARO_WINKLER],
        default=EDIT_METRIC_LEVENSHTEIN,
    )
    p.add_argument("--matrix", type=Path, help="distance matrix for neighbor annotations")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("run", help="run the full pipeline from a TOML config")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--no-validate", action="store_true", help="skip upfront input checks")

    p = sub.add_parser("serve", help="serve run artifacts to the curation UI")
    p.add_argument("--run-dir", required=True, type=Path)
    p.add_argument("--port", type=int, default=8040)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--journal", type=Path)
    p.add_argument("--static-dir", type=Path)
    return parser


def _cmd_normalize(args: argparse.Namespace) -> None:
    corpus = build_corpus(read_raw_field_names(args.input, args.column))
    save_corpus_csv(corpus, args.out)
    print(f"wrote {len(corpus)} field names to {args.out}")


def _cmd_distances(args: argparse.Namespace) -> None:
    corpus = load_corpus_csv(args.corpus)
    store = None
    if args.metric is DistanceMetricId.COSINE_EMBEDDING:
        if not args.vectors or not args.idf:
            raise ConfigError("--vectors and --idf are required for the cosine metric")
        store = EmbeddingStore(load_word_vectors(args.vectors), load_idf(args.idf))
    matrix = build_distance_matrix(corpus, args.metric, store, workers=args.workers)
    matrix.save(args.out)
    print(f"wrote {matrix.values.size} pairwise distances (n={matrix.n}) to {args.out}")


def _cmd_cluster(args: argparse.Namespace) -> None:
    matrix = DistanceMatrix.load(args.matrix)
    if args.algorithm == clustering.ALGORITHM_AFFINITY_PROPAGATION:
        result = clustering.affinity_propagation(
            matrix,
            damping=args.damping,
            max_iter=args.max_iter,
            convergence_iter=args.convergence_iter,
            preference=args.preference,
            workers=args.workers,
        )
    elif args.algorithm == clustering.ALGORITHM_DBSCAN:
        result = clustering.dbscan(matrix, eps=args.eps, min_pts=args.min_pts)
    else:
        result = clustering.hdbscan(
            matrix, min_cluster_size=args.min_cluster_size, min_samples=args.min_samples
        )
    clustering.save_clusters(result, args.out)
    print(f"wrote {result.num_clusters()} clusters ({len(result.noise())} noise) to {args.out}")


def _cmd_embed(args: argparse.Namespace) -> None:
    store = EmbeddingStore(load_word_vectors(args.vectors), load_idf(args.idf))
    if args.labels:
        labels = [f.normalized for f in load_corpus_csv(args.labels)]
    else:
        labels = [t.normalized_label for t in load_term_table(args.terms).terms]
    embeddings = embed_corpus(labels, store.vectors, store.idf, workers=args.workers)
    save_embeddings(embeddings, args.out)
    print(f"wrote {len(embeddings)} embeddings (dimension {store.dimension}) to {args.out}")


def _cmd_ingest(args: argparse.Namespace) -> None:
    extraction = extract_labels_ntriples(args.ntriples, args.ontology_id, strict=args.strict)
    save_term_table(extraction.index, args.out)
    print(
        f"wrote {len(extraction.index)} terms to {args.out}"
        f" ({extraction.skipped} malformed lines skipped)"
    )


def _cmd_align(args: argparse.Namespace) -> None:
    corpus = load_corpus_csv(args.corpus)
    clusters = clustering.load_clusters(args.clusters)
    index = load_term_table(args.terms)
    field_embeddings = load_embeddings(args.field_embeddings)
    term_embeddings = load_embeddings(args.term_embeddings)
    amap = align_fields(
        corpus,
        field_embeddings,
        index,
        term_embeddings,
        r=args.threshold,
        top_k=args.top_k,
        edit_metric=args.edit_metric,
        cosine_floor=args.cosine_floor,
        workers=args.workers,
    )
    recommendations = recommend_clusters(clusters, amap, index)
    try:
        coverage = coverage_report(clusters, amap, index).__dict__
    except OntoalignError:
        coverage = None
    neighbors = None
    if args.matrix:
        neighbors = cluster_neighbors(clusters, DistanceMatrix.load(args.matrix), k=3)
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
                    {"index": j, "normalized": corpus[j].normalized, "distance": dist}
                    for j, dist in (neighbors[f.index] if neighbors else [])
                ],
            }
            for f in corpus
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
        "params": {
            "threshold_r": args.threshold,
            "top_k": args.top_k,
            "cosine_floor": args.cosine_floor,
            "edit_metric": args.edit_metric,
        },
    }
    with args.out.open("w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    aligned = sum(1 for f in payload["fields"] if f["candidates"])
    print(f"aligned {aligned}/{len(corpus)} field names; wrote {args.out}")


def _cmd_run(args: argparse.Namespace) -> None:
    config = RunConfig.from_toml(args.config)
    report = run_pipeline(config, validate_inputs=not args.no_validate)
    print(json.dumps(report, indent=2))


def _cmd_serve(args: argparse.Namespace) -> None:
    from .server import serve

    serve(
        args.run_dir,
        port=args.port,
        host=args.host,
        journal_path=args.journal,
        static_dir=args.static_dir,
    )


_COMMANDS = {
    "normalize": _cmd_normalize,
    "distances": _cmd_distances,
    "cluster": _cmd_cluster,
    "embed": _cmd_embed,
    "ingest": _cmd_ingest,
    "align": _cmd_align,
    "run": _cmd_run,
    "serve": _cmd_serve,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except OntoalignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
