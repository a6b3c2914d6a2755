"""Client for an external annotator service (NCBO Annotator REST convention).

Used for side-by-side comparisons: the service receives each field name as
text and returns ontology-term annotations. Responses are mapped into the
same candidate shape the aligner produces, minus the similarity scores.
Per-field failures are recorded without aborting the batch.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import requests

from .align import AlignmentMap

logger = logging.getLogger(__name__)

SOURCE_EXTERNAL = "external"


@dataclass(frozen=True)
class ExternalCandidate:
    """One term suggested by the external service."""

    iri: str
    label: str
    ontology_id: str
    source: str = SOURCE_EXTERNAL


@dataclass
class ExternalAnnotation:
    """Per-field outcome: candidates on success, an error message otherwise."""

    field: str
    candidates: list[ExternalCandidate] = field(default_factory=list)
    error: Optional[str] = None


def _ontology_acronym(annotation: dict) -> str:
    links = annotation.get("annotatedClass", {}).get("links", {})
    ontology_url = links.get("ontology", "")
    return ontology_url.rstrip("/").rsplit("/", 1)[-1] if ontology_url else ""


def _parse_annotations(payload: object) -> list[ExternalCandidate]:
    candidates: list[ExternalCandidate] = []
    if not isinstance(payload, list):
        return candidates
    for annotation in payload:
        annotated = annotation.get("annotatedClass", {})
        iri = annotated.get("@id")
        if not iri:
            continue
        candidates.append(
            ExternalCandidate(
                iri=iri,
                label=annotated.get("prefLabel", ""),
                ontology_id=_ontology_acronym(annotation),
            )
        )
    return candidates


def annotate_external(
    fields: Sequence[str],
    endpoint: str,
    api_key: Optional[str] = None,
    *,
    ontologies: Optional[str] = None,
    whole_word_only: Optional[bool] = None,
    session: Optional[requests.Session] = None,
    max_retries: int = 3,
    backoff_s: float = 0.5,
    min_interval_s: float = 0.0,
    timeout_s: float = 30.0,
    sleep: Callable[[float], None] = time.sleep,
) -> list[ExternalAnnotation]:
    """Annotate each field name through the external service.

    Requests are rate limited to one per ``min_interval_s`` and retried with
    exponential backoff on 5xx and transport errors (4xx responses are not
    retried). HTTP failures are surfaced per field on the returned records.
    The annotator's invocation knobs (ontology set, whole-word matching) pass
    through unchanged.
    """
    own_session = session is None
    session = session or requests.Session()
    results: list[ExternalAnnotation] = []
    try:
        for position, text in enumerate(fields):
            if position and min_interval_s > 0:
                sleep(min_interval_s)
            params: dict[str, str] = {"text": text}
            if api_key:
                params["apikey"] = api_key
            if ontologies:
                params["ontologies"] = ontologies
            if whole_word_only is not None:
                params["whole_word_only"] = "true" if whole_word_only else "false"
            results.append(_annotate_one(session, endpoint, text, params, max_retries, backoff_s, timeout_s, sleep))
    finally:
        if own_session:
            session.close()
    return results


def _annotate_one(
    session: requests.Session,
    endpoint: str,
    text: str,
    params: dict,
    max_retries: int,
    backoff_s: float,
    timeout_s: float,
    sleep: Callable[[float], None],
) -> ExternalAnnotation:
    error = "not attempted"
    for attempt in range(max_retries):
        try:
            response = session.get(endpoint, params=params, timeout=timeout_s)
        except requests.RequestException as exc:
            error = f"request failed: {exc}"
        else:
            if response.status_code == 200:
                return ExternalAnnotation(field=text, candidates=_parse_annotations(response.json()))
            error = f"HTTP {response.status_code}"
            if 400 <= response.status_code < 500:
                break  # client errors will not improve on retry
        if attempt + 1 < max_retries:
            sleep(backoff_s * (2**attempt))
    logger.warning("external annotation failed for %r: %s", text, error)
    return ExternalAnnotation(field=text, error=error)


def comparison_report(
    fields: Sequence[str],
    amap: AlignmentMap,
    external: Sequence[ExternalAnnotation],
) -> dict:
    """Count fields aligned by each source, for internal-vs-external studies."""
    if len(fields) != len(amap.per_field) or len(fields) != len(external):
        raise ValueError("fields, alignment map, and external results must be parallel")
    internal_hits = [bool(candidates) for candidates in amap.per_field]
    external_hits = [bool(record.candidates) for record in external]
    return {
        "fields": len(fields),
        "internal_aligned": sum(internal_hits),
        "external_aligned": sum(external_hits),
        "both_aligned": sum(1 for a, b in zip(internal_hits, external_hits) if a and b),
        "only_internal": sum(1 for a, b in zip(internal_hits, external_hits) if a and not b),
        "only_external": sum(1 for a, b in zip(internal_hits, external_hits) if b and not a),
        "external_errors": sum(1 for record in external if record.error is not None),
    }
