"""Ontology term ingestion from TSV tables and N-Triples label extraction.

The alignment layer only needs (IRI, human-readable label, ontology id)
triples. Full OWL parsing is out of scope; ontologies are expected to be
pre-converted to either the three-column TSV format or N-Triples, from which
``rdfs:label`` and ``skos:prefLabel`` values are extracted.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .corpus import normalize
from .errors import EmptyIndex, FormatError, ParseError

logger = logging.getLogger(__name__)

TERM_TSV_HEADER = ("iri", "label", "ontology_id")

LABEL_PREDICATES = frozenset(
    {
        "http://www.w3.org/2000/01/rdf-schema#label",
        "http://www.w3.org/2004/02/skos/core#prefLabel",
    }
)

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}


@dataclass(frozen=True)
class OntologyTerm:
    """One candidate label of an ontology term."""

    iri: str
    label: str
    normalized_label: str
    ontology_id: str


@dataclass
class TermIndex:
    """All ingested ontology terms plus a per-ontology index."""

    terms: list[OntologyTerm]
    by_ontology: dict[str, list[int]] = field(default_factory=dict)

    @classmethod
    def from_terms(cls, terms: Iterable[OntologyTerm]) -> "TermIndex":
        terms = list(terms)
        by_ontology: dict[str, list[int]] = {}
        for position, term in enumerate(terms):
            by_ontology.setdefault(term.ontology_id, []).append(position)
        return cls(terms=terms, by_ontology=by_ontology)

    def __len__(self) -> int:
        return len(self.terms)

    def ontology_ids(self) -> list[str]:
        return sorted(self.by_ontology)


def _build_terms(
    rows: Iterable[tuple[int, str, str, str]]
) -> list[OntologyTerm]:
    """Normalize labels, drop short ones with a warning, dedupe exact rows."""
    seen: set[tuple[str, str, str]] = set()
    terms: list[OntologyTerm] = []
    for lineno, iri, label, ontology_id in rows:
        key = (iri, ontology_id, label)
        if key in seen:
            continue
        seen.add(key)
        normalized = normalize(label)
        if normalized is None:
            logger.warning("dropping term %s at line %d: label %r too short", iri, lineno, label)
            continue
        terms.append(
            OntologyTerm(iri=iri, label=label, normalized_label=normalized, ontology_id=ontology_id)
        )
    return terms


def load_term_table(path: Union[str, Path]) -> TermIndex:
    """Load the three-column TSV term table (header ``iri label ontology_id``)."""
    path = Path(path)
    rows: list[tuple[int, str, str, str]] = []
    with path.open("r", encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n")
        if tuple(header.split("\t")) != TERM_TSV_HEADER:
            expected = "\\t".join(TERM_TSV_HEADER)
            raise FormatError(f"expected header {expected!r} in {path}", line=1)
        for lineno, line in enumerate(handle, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(f"expected 3 tab-separated columns, got {len(parts)}", line=lineno)
            iri, label, ontology_id = parts
            if not iri:
                raise FormatError("empty IRI", line=lineno)
            rows.append((lineno, iri, label, ontology_id))
    terms = _build_terms(rows)
    if not terms:
        raise EmptyIndex(f"no usable terms in {path}")
    return TermIndex.from_terms(terms)


def save_term_table(index: TermIndex, path: Union[str, Path]) -> None:
    """Write a TermIndex back to the TSV format (round-trips exactly)."""
    with Path(path).open("w", encoding="utf-8") as handle:
        handle.write("\t".join(TERM_TSV_HEADER) + "\n")
        for term in index.terms:
            handle.write(f"{term.iri}\t{term.label}\t{term.ontology_id}\n")


@dataclass
class NTriplesExtraction:
    """Result of an N-Triples label extraction run."""

    index: TermIndex
    skipped: int = 0
    error_lines: list[tuple[int, str]] = field(default_factory=list)


class _LineParser:
    """Single-line N-Triples scanner for the grammar subset we accept."""

    def __init__(self, line: str, lineno: int) -> None:
        self.line = line
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str) -> ParseError:
        return ParseError(message, line=self.lineno)

    def skip_ws(self) -> None:
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        return self.line[self.pos] if self.pos < len(self.line) else ""

    def parse_iri(self) -> str:
        if self.peek() != "<":
            raise self.error("expected '<' to open an IRI")
        end = self.line.find(">", self.pos + 1)
        if end < 0:
            raise self.error("unterminated IRI (missing '>')")
        iri = self.line[self.pos + 1 : end]
        if not iri or any(c in iri for c in ' "<{}|^`') or "\\" in iri:
            raise self.error(f"invalid IRI {iri!r}")
        self.pos = end + 1
        return iri

    def parse_blank(self) -> str:
        # _:name, subset: alphanumerics and underscores
        start = self.pos
        self.pos += 2
        while self.pos < len(self.line) and (self.line[self.pos].isalnum() or self.line[self.pos] == "_"):
            self.pos += 1
        if self.pos == start + 2:
            raise self.error("empty blank node label")
        return self.line[start : self.pos]

    def parse_literal(self) -> str:
        if self.peek() != '"':
            raise self.error("expected '\"' to open a literal")
        self.pos += 1
        out: list[str] = []
        while True:
            if self.pos >= len(self.line):
                raise self.error("unterminated literal")
            ch = self.line[self.pos]
            if ch == '"':
                self.pos += 1
                break
            if ch == "\\":
                out.append(self._parse_escape())
                continue
            out.append(ch)
            self.pos += 1
        self._skip_literal_suffix()
        return "".join(out)

    def _parse_escape(self) -> str:
        if self.pos + 1 >= len(self.line):
            raise self.error("dangling escape at end of line")
        kind = self.line[self.pos + 1]
        if kind in _ESCAPES:
            self.pos += 2
            return _ESCAPES[kind]
        if kind in ("u", "U"):
            digits = 4 if kind == "u" else 8
            start = self.pos + 2
            hexpart = self.line[start : start + digits]
            if len(hexpart) != digits or any(c not in "0123456789abcdefABCDEF" for c in hexpart):
                raise self.error(f"bad \\{kind} escape")
            code = int(hexpart, 16)
            if code > 0x10FFFF:
                raise self.error(f"\\{kind} escape out of range")
            self.pos = start + digits
            return chr(code)
        raise self.error(f"unknown escape \\{kind}")

    def _skip_literal_suffix(self) -> None:
        # Strip an optional language tag or datatype annotation.
        if self.peek() == "@":
            self.pos += 1
            start = self.pos
            while self.pos < len(self.line) and (self.line[self.pos].isalnum() or self.line[self.pos] == "-"):
                self.pos += 1
            if self.pos == start:
                raise self.error("empty language tag")
        elif self.line.startswith("^^", self.pos):
            self.pos += 2
            self.parse_iri()

    def parse(self) -> Optional[tuple[str, str, str, bool]]:
        """Return (subject, predicate, object, object_is_literal) or None.

        None means the line is blank or a comment. Blank-node subjects are
        parsed but flagged by returning a subject starting with ``_:``.
        """
        self.skip_ws()
        if not self.peek() or self.peek() == "#":
            return None
        if self.line.startswith("_:", self.pos):
            subject = self.parse_blank()
        else:
            subject = self.parse_iri()
        self.skip_ws()
        predicate = self.parse_iri()
        self.skip_ws()
        head = self.peek()
        if head == '"':
            obj, is_literal = self.parse_literal(), True
        elif self.line.startswith("_:", self.pos):
            obj, is_literal = self.parse_blank(), False
        else:
            obj, is_literal = self.parse_iri(), False
        self.skip_ws()
        if self.peek() != ".":
            raise self.error("expected terminating '.'")
        self.pos += 1
        self.skip_ws()
        if self.peek():
            raise self.error("trailing characters after '.'")
        return subject, predicate, obj, is_literal


def extract_labels_ntriples(
    path: Union[str, Path],
    ontology_id: str,
    strict: bool = False,
) -> NTriplesExtraction:
    """Extract ``rdfs:label`` / ``skos:prefLabel`` literals from N-Triples.

    Blank lines and ``#`` comments are ignored. Triples with other
    predicates, non-literal objects, or blank-node subjects are silently
    dropped. Malformed lines raise ParseError in strict mode; in the default
    lenient mode they are skipped and counted in the returned extraction.
    """
    path = Path(path)
    rows: list[tuple[int, str, str, str]] = []
    skipped = 0
    error_lines: list[tuple[int, str]] = []
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            try:
                parsed = _LineParser(line.rstrip("\r\n"), lineno).parse()
            except ParseError as exc:
                if strict:
                    raise
                skipped += 1
                error_lines.append((lineno, str(exc)))
                logger.warning("skipping malformed N-Triples %s", exc)
                continue
            if parsed is None:
                continue
            subject, predicate, obj, is_literal = parsed
            if subject.startswith("_:") or predicate not in LABEL_PREDICATES or not is_literal:
                continue
            rows.append((lineno, subject, obj, ontology_id))
    terms = _build_terms(rows)
    if not terms:
        raise EmptyIndex(f"no label triples found in {path}")
    return NTriplesExtraction(index=TermIndex.from_terms(terms), skipped=skipped, error_lines=error_lines)
