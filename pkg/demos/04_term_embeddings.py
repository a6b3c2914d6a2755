"""
Term embeddings: IDF-weighted word-vector averages
==================================================

A term embedding is the IDF-weighted mean of the word vectors of a label's
tokens. Rare words (high IDF) dominate the average; ubiquitous words barely
move it; out-of-vocabulary words fall back to a default vector with a tiny
default weight (0.01), so every label gets a finite vector.
"""

import numpy as np

from ontoalign import WordVectorTable, co_sim, compute_idf, term_embedding

# A miniature vocabulary with hand-picked 4-d vectors.
entries = {
    "tumor":  np.array([1.0, 0.0, 0.0, 0.2]),
    "region": np.array([0.0, 1.0, 0.0, 0.2]),
    "site":   np.array([0.1, 0.9, 0.1, 0.2]),   # deliberately close to "region"
    "sample": np.array([0.0, 0.0, 1.0, 0.2]),
}
vectors = WordVectorTable(
    dimension=4,
    entries=entries,
    default_vector=np.mean(np.stack(list(entries.values())), axis=0),
)

# IDF from a toy document stream: "tumor" is everywhere (low weight),
# "site" is rare (high weight).
documents = (
    [["tumor", "region", "sample"]] * 8
    + [["tumor", "region"]] * 6
    + [["tumor", "site"]] * 2
)
idf = compute_idf(documents, min_doc_freq=1)
print("idf weights:", {w: round(v, 3) for w, v in sorted(idf.entries.items())})

for label in ["tumor region", "region tumor", "tumor site", "tumor zzqx"]:
    vector = term_embedding(label, vectors, idf).vector
    print(f"{label!r:16} -> {np.round(vector, 3)}")

# Word order never matters: embeddings are bit-identical.
a = term_embedding("tumor region", vectors, idf).vector
b = term_embedding("region tumor", vectors, idf).vector
print("\norder-insensitive:", np.array_equal(a, b))

# Cosine similarity is the semantic signal used by the aligner.
x = term_embedding("tumor region", vectors, idf)
y = term_embedding("tumor site", vectors, idf)
z = term_embedding("sample", vectors, idf)
print(f"co_sim('tumor region', 'tumor site') = {co_sim(x, y):.4f}")
print(f"co_sim('tumor region', 'sample')     = {co_sim(x, z):.4f}")
