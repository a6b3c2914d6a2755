"""Exception types shared across the ontoalign package."""

from __future__ import annotations

from typing import Optional


class OntoalignError(Exception):
    """Base class for all errors raised by this package."""


class EmptyCorpus(OntoalignError):
    """Every input field name was filtered out during normalization."""


class MissingStore(OntoalignError):
    """The cosine metric was requested without an embedding store."""


class FormatError(OntoalignError):
    """A tabular, vector, or binary input file is malformed.

    Carries the 1-based line number when one is known.
    """

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(FormatError):
    """An N-Triples line could not be parsed (raised in strict mode)."""


class EmptyIndex(OntoalignError):
    """No usable ontology terms remained after parsing and filtering."""


class EmptyLabel(OntoalignError):
    """A label tokenized to nothing, so no embedding can be computed."""


class ZeroVector(OntoalignError):
    """Cosine similarity is undefined for an all-zero vector."""


class AllNoise(OntoalignError):
    """A clustering produced no non-noise clusters to report on."""


class ConfigError(OntoalignError):
    """A run configuration is invalid or references missing inputs."""


class StageError(OntoalignError):
    """A pipeline stage failed; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: BaseException) -> None:
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


class JournalError(OntoalignError):
    """The curation decision journal is corrupt."""
