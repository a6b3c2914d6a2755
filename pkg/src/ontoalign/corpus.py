"""Field-name normalization and working-set construction.

Raw metadata field names arrive in many shapes ("Lat-Long", "geoLocation",
"tissue_source"). Normalization maps them onto a shared lowercase
space-separated form so the distance, clustering, and alignment layers can
treat them uniformly.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .errors import EmptyCorpus, FormatError

# Normalized names shorter than this (spaces removed) are dropped as
# inappropriately short for metadata field names.
MIN_NORMALIZED_LENGTH = 3

_CAMEL_BOUNDARY = re.compile(r"([a-z])([A-Z])")
_NON_ALPHA = re.compile(r"[^A-Za-z]+")

CORPUS_CSV_HEADER = ("index", "raw", "normalized")


@dataclass(frozen=True)
class RawFieldName:
    """A field name as found in the source repository."""

    text: str
    source_id: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("raw field name text must be non-empty")


@dataclass(frozen=True)
class FieldName:
    """A normalized field name with its stable position in the working set."""

    raw: RawFieldName
    normalized: str
    index: int


def normalize(raw: str) -> Optional[str]:
    """Normalize a raw field name, or return None if it is too short.

    Rules apply in a fixed order:

    1. split CamelCase at lower-to-upper boundaries ("geoLocation" ->
       "geo Location"); all-caps runs such as "DNA" are left intact,
    2. replace every non-alphabetic character (digits included) with a space,
    3. lowercase,
    4. collapse runs of spaces to one and trim the ends.

    Names whose normalized form has fewer than 3 letters are rejected.
    """
    text = _CAMEL_BOUNDARY.sub(r"\1 \2", raw)
    text = _NON_ALPHA.sub(" ", text)
    text = " ".join(text.lower().split())
    if len(text.replace(" ", "")) < MIN_NORMALIZED_LENGTH:
        return None
    return text


def build_corpus(raws: Sequence[RawFieldName]) -> list[FieldName]:
    """Normalize, filter, and deduplicate raw names into the working set.

    Deduplication is by normalized form, keeping the first occurrence.
    Indices are assigned contiguously in first-occurrence order.

    Raises EmptyCorpus when every input is filtered out.
    """
    seen: set[str] = set()
    out: list[FieldName] = []
    for raw in raws:
        norm = normalize(raw.text)
        if norm is None or norm in seen:
            continue
        seen.add(norm)
        out.append(FieldName(raw=raw, normalized=norm, index=len(out)))
    if not out:
        raise EmptyCorpus("all input field names were filtered out")
    return out


def read_raw_field_names(
    path: Union[str, Path], column: Optional[str] = None
) -> list[RawFieldName]:
    """Read raw field names from a newline-delimited file or a CSV column.

    With ``column`` set the file is parsed as CSV and the named column is
    extracted; otherwise each non-empty line is one raw field name.
    """
    path = Path(path)
    raws: list[RawFieldName] = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        if column is None:
            for lineno, line in enumerate(handle, start=1):
                text = line.rstrip("\r\n")
                if not text:
                    continue
                raws.append(RawFieldName(text=text, source_id=f"{path.name}:{lineno}"))
        else:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None or column not in reader.fieldnames:
                raise FormatError(f"column {column!r} not found in {path}", line=1)
            for rowno, row in enumerate(reader, start=2):
                text = (row.get(column) or "").strip()
                if not text:
                    continue
                raws.append(RawFieldName(text=text, source_id=f"{path.name}:{rowno}"))
    return raws


def save_corpus_csv(corpus: Sequence[FieldName], path: Union[str, Path]) -> None:
    """Write the working set as CSV with columns index, raw, normalized."""
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CORPUS_CSV_HEADER)
        for field in corpus:
            writer.writerow([field.index, field.raw.text, field.normalized])


def load_corpus_csv(path: Union[str, Path]) -> list[FieldName]:
    """Load a working set previously written by save_corpus_csv."""
    path = Path(path)
    corpus: list[FieldName] = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != CORPUS_CSV_HEADER:
            raise FormatError(
                f"expected header {','.join(CORPUS_CSV_HEADER)!r} in {path}", line=1
            )
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise FormatError(f"expected 3 columns, got {len(row)}", line=lineno)
            index, raw, normalized = row
            corpus.append(
                FieldName(raw=RawFieldName(text=raw), normalized=normalized, index=int(index))
            )
    if not corpus:
        raise EmptyCorpus(f"no field names in {path}")
    for expected, field in enumerate(corpus):
        if field.index != expected:
            raise FormatError(f"indices are not contiguous at {field.index}")
    return corpus
