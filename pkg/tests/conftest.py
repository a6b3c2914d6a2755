"""Shared fixtures: a small deterministic corpus, vocabulary, and term set.

The toy world has 20 raw field names over a 10-word vocabulary and 50
ontology terms spread across three ontologies. Several field names are
chosen to normalize to exactly the same string as a term label, which pins
down the rank-1 exact-match behavior end to end.
"""

from __future__ import annotations

import numpy as np
import pytest

from ontoalign.corpus import RawFieldName, build_corpus
from ontoalign.embedding import EmbeddingStore, IdfTable, WordVectorTable
from ontoalign.ontology import OntologyTerm, TermIndex

VOCABULARY = [
    "tumor",
    "region",
    "tissue",
    "source",
    "sample",
    "depth",
    "organ",
    "site",
    "cell",
    "patient",
]

RAW_FIELD_NAMES = [
    "tumor region",
    "Tumor-Region",  # duplicate of the first after normalization
    "tissueSource",
    "sample_depth",
    "source organ",
    "patient cell",
    "cell region",
    "tumor site",
    "tissue region",
    "sample source",
    "depth of sample!!",
    "organ site",
    "patient tumor",
    "cellSample",
    "region depth",
    "site of tissue",
    "tumor cell region",
    "patient organ",
    "sourceSite",
    "tissue depth",
    "sample region",
]

TERM_LABELS = [
    # ontology OA: 20 terms, includes exact matches for several fields
    ("http://purl.example.org/OA_%04d", "OA", [
        "tumor region",
        "tissue source",
        "sample depth",
        "source organ",
        "patient cell",
        "cell region",
        "tumor site",
        "tumor cell",
        "region of tumor",
        "tissue sample",
        "depth sample",
        "organ region",
        "patient site",
        "cell source",
        "site region",
        "tumor depth",
        "sample organ",
        "tissue cell",
        "patient depth",
        "source region",
    ]),
    # ontology OB: 15 terms
    ("http://purl.example.org/OB_%04d", "OB", [
        "tumor region site",
        "tissue source site",
        "sample depth measure",
        "organ site",
        "patient tumor cell",
        "region depth",
        "cell sample",
        "site tissue",
        "tumor tissue",
        "sample patient",
        "depth region",
        "organ cell",
        "source depth",
        "patient region",
        "tissue organ",
    ]),
    # ontology OC: 15 terms
    ("http://purl.example.org/OC_%04d", "OC", [
        "cancer region",
        "body site",
        "specimen depth",
        "donor organ",
        "subject cell",
        "region sample",
        "site sample",
        "tumor specimen",
        "tissue donor",
        "depth value",
        "organ source",
        "cell patient",
        "source tissue",
        "patient sample",
        "region tissue",
    ]),
]


def make_vocabulary_tables(dimension: int = 16, seed: int = 42):
    rng = np.random.default_rng(seed)
    entries = {}
    for word in VOCABULARY:
        entries[word] = np.round(rng.standard_normal(dimension), 6)
    default = np.mean(np.stack(list(entries.values())), axis=0)
    vectors = WordVectorTable(dimension=dimension, entries=entries, default_vector=default)
    idf_values = np.round(rng.uniform(0.5, 3.0, size=len(VOCABULARY)), 6)
    idf = IdfTable(entries={w: float(v) for w, v in zip(VOCABULARY, idf_values)})
    return vectors, idf


def make_term_index() -> TermIndex:
    terms = []
    for iri_pattern, ontology_id, labels in TERM_LABELS:
        for k, label in enumerate(labels):
            terms.append(
                OntologyTerm(
                    iri=iri_pattern % k,
                    label=label,
                    normalized_label=label,
                    ontology_id=ontology_id,
                )
            )
    return TermIndex.from_terms(terms)


@pytest.fixture(scope="session")
def toy_vectors_idf():
    return make_vocabulary_tables()


@pytest.fixture(scope="session")
def toy_store(toy_vectors_idf):
    vectors, idf = toy_vectors_idf
    return EmbeddingStore(vectors, idf)


@pytest.fixture(scope="session")
def toy_corpus():
    return build_corpus([RawFieldName(text=t) for t in RAW_FIELD_NAMES])


@pytest.fixture(scope="session")
def toy_terms():
    return make_term_index()


def write_toy_inputs(directory, column=None):
    """Materialize the toy world as pipeline input files; returns their paths."""
    from ontoalign.embedding import save_idf, save_word_vectors
    from ontoalign.ontology import save_term_table

    vectors, idf = make_vocabulary_tables()
    paths = {
        "corpus": directory / "fields.txt",
        "vectors": directory / "vectors.txt",
        "idf": directory / "idf.tsv",
        "terms": directory / "terms.tsv",
    }
    if column is None:
        paths["corpus"].write_text("\n".join(RAW_FIELD_NAMES) + "\n", encoding="utf-8")
    else:
        lines = [column] + RAW_FIELD_NAMES
        paths["corpus"].write_text("\n".join(lines) + "\n", encoding="utf-8")
    save_word_vectors(vectors, paths["vectors"])
    save_idf(idf, paths["idf"])
    save_term_table(make_term_index(), paths["terms"])
    return paths


TOY_CONFIG_TEMPLATE = """\
corpus = "fields.txt"
vectors = "vectors.txt"
idf = "idf.tsv"
terms = "terms.tsv"
out_dir = "{out_dir}"
metric = "jaro_winkler"
algorithm = "affinity_propagation"
threshold_r = 0.85
top_k = 10
workers = 1
"""


def write_toy_config(directory, out_dir="out"):
    path = directory / "run.toml"
    path.write_text(TOY_CONFIG_TEMPLATE.format(out_dir=out_dir), encoding="utf-8")
    return path


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    lines = []
    for status, label in (("passed", "PASS"), ("failed", "FAIL"), ("skipped", "SKIP")):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid and getattr(report, "when", "call") == "call":
                lines.append((nodeid.split("::")[-1], label))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, label in sorted(lines):
            terminalreporter.write_line(f"{label}  {name}")
