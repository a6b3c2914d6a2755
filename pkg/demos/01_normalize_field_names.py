"""
Normalizing raw metadata field names
====================================

Metadata authors write the same field name dozens of ways: "lat lon",
"Lat-Long", "latLong", "lat_long_1". Normalization folds all of them onto a
single lowercase, space-separated form so the rest of the pipeline can
compare and cluster them.
"""

from ontoalign import RawFieldName, build_corpus, normalize

# Rule order: CamelCase split, non-letters to spaces, lowercase, collapse.
for raw in ["Lat-Long", "geoLocation", "tumor   region!!", "sample_depth_m2", "DNA", "ab"]:
    print(f"{raw!r:24} -> {normalize(raw)!r}")

# build_corpus applies normalize, drops too-short names, removes duplicates,
# and assigns stable indices in first-occurrence order.
raws = [
    RawFieldName("Lat-Long"),
    RawFieldName("lat long"),        # duplicate after normalization
    RawFieldName("latLong"),         # also a duplicate
    RawFieldName("geo location"),
    RawFieldName("xy"),              # too short, dropped
]
corpus = build_corpus(raws)

print("\nworking set:")
for field in corpus:
    print(f"  [{field.index}] {field.normalized!r}   (from {field.raw.text!r})")
