"""ontoalign: align metadata field names with ontology terms.

The library clusters field names under string-distance metrics, embeds both
field names and ontology-term labels as IDF-weighted word-vector averages,
and ranks candidate terms by the mean of embedding cosine similarity and
edit similarity. See README.md for a walkthrough and the demos/ directory
for runnable examples of each capability.
"""

from .align import (
    AlignmentCandidate,
    AlignmentMap,
    ClusterRecommendation,
    CoverageReport,
    align,
    build_similarity_matrix,
    cluster_neighbors,
    co_sim,
    coverage_report,
    recommend_clusters,
    recommend_ontology,
    topk_similarities,
)
from .cluster import (
    NOISE,
    ClusterSet,
    ClusterStats,
    affinity_propagation,
    cluster_stats,
    dbscan,
    hdbscan,
    load_clusters,
    save_clusters,
)
from .corpus import FieldName, RawFieldName, build_corpus, normalize
from .distance import (
    DistanceMatrix,
    DistanceMetricId,
    build_distance_matrix,
    cosine_embedding_distance,
    normalized_distance,
)
from .embedding import (
    EmbeddingStore,
    IdfTable,
    TermEmbedding,
    WordVectorTable,
    compute_idf,
    embed_corpus,
    load_embeddings,
    load_idf,
    load_word_vectors,
    save_embeddings,
    term_embedding,
)
from .metrics import damerau_levenshtein, edit_sim, jaccard_tokens, jaro, jaro_winkler, levenshtein
from .ontology import (
    NTriplesExtraction,
    OntologyTerm,
    TermIndex,
    extract_labels_ntriples,
    load_term_table,
    save_term_table,
)
from .pipeline import RunConfig, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "AlignmentCandidate",
    "AlignmentMap",
    "ClusterRecommendation",
    "ClusterSet",
    "ClusterStats",
    "CoverageReport",
    "DistanceMatrix",
    "DistanceMetricId",
    "EmbeddingStore",
    "FieldName",
    "IdfTable",
    "NOISE",
    "NTriplesExtraction",
    "OntologyTerm",
    "RawFieldName",
    "RunConfig",
    "TermEmbedding",
    "TermIndex",
    "WordVectorTable",
    "affinity_propagation",
    "align",
    "build_corpus",
    "build_distance_matrix",
    "build_similarity_matrix",
    "cluster_neighbors",
    "cluster_stats",
    "co_sim",
    "compute_idf",
    "cosine_embedding_distance",
    "coverage_report",
    "damerau_levenshtein",
    "dbscan",
    "edit_sim",
    "embed_corpus",
    "extract_labels_ntriples",
    "hdbscan",
    "jaccard_tokens",
    "jaro",
    "jaro_winkler",
    "levenshtein",
    "load_clusters",
    "load_embeddings",
    "load_idf",
    "load_term_table",
    "load_word_vectors",
    "normalize",
    "normalized_distance",
    "recommend_clusters",
    "recommend_ontology",
    "run_pipeline",
    "save_clusters",
    "save_embeddings",
    "save_term_table",
    "term_embedding",
    "topk_similarities",
]
