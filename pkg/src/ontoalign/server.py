"""Serve mode: a read-only view over run artifacts plus a decision journal.

The curation UI talks to this API exclusively. Decisions are appended to a
JSON-lines journal (one decision per line) and survive restarts; run
artifacts are never mutated. Export folds the journal with last-decision-wins
per field index and emits the accepted mappings as TSV.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .errors import JournalError

JOURNAL_NAME = "decisions.jsonl"
EXPORT_HEADER = "normalized_field\tiri\tlabel\tontology_id"


@dataclass
class CurationDecision:
    """One accept/reject decision for a field name."""

    field_index: int
    iri: Optional[str] = None  # absent = rejected all suggestions
    ontology_id: Optional[str] = None
    note: Optional[str] = None
    decided_at: float = 0.0


class DecisionJournal:
    """Append-only JSON-lines store with single-writer serialization."""

    def __init__(self, path: Union[str, Path]) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        self._decisions: list[CurationDecision] = []
        if self.path.exists():
            self._replay()

    def _replay(self) -> None:
        with self.path.open("r", encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    self._decisions.append(CurationDecision(**record))
                except (json.JSONDecodeError, TypeError) as exc:
                    raise JournalError(
                        f"corrupt journal {self.path} at line {lineno}: {exc}: {line!r}"
                    ) from None

    def append(self, decision: CurationDecision) -> None:
        with self._lock:
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(asdict(decision)) + "\n")
            self._decisions.append(decision)

    def decisions(self) -> list[CurationDecision]:
        with self._lock:
            return list(self._decisions)

    def latest_by_field(self) -> dict[int, CurationDecision]:
        """Fold the journal, last decision winning per field index."""
        latest: dict[int, CurationDecision] = {}
        for decision in self.decisions():
            latest[decision.field_index] = decision
        return latest


@dataclass
class RunState:
    """Artifacts of a completed run, loaded once and shared read-only."""

    clusters: dict
    alignments: dict
    report: dict

    @classmethod
    def load(cls, run_dir: Union[str, Path]) -> "RunState":
        run_dir = Path(run_dir)

        def read(name: str) -> dict:
            with (run_dir / name).open("r", encoding="utf-8") as handle:
                return json.load(handle)

        return cls(
            clusters=read("clusters.json"),
            alignments=read("alignments.json"),
            report=read("report.json"),
        )


class DecisionRequest(BaseModel):
    field_index: int
    iri: Optional[str] = None
    ontology_id: Optional[str] = None
    note: Optional[str] = None


def create_app(
    run_dir: Union[str, Path],
    journal_path: Optional[Union[str, Path]] = None,
    static_dir: Optional[Union[str, Path]] = None,
) -> FastAPI:
    """Build the serve-mode application for one run directory."""
    run_dir = Path(run_dir)
    state = RunState.load(run_dir)
    journal = DecisionJournal(journal_path or run_dir / JOURNAL_NAME)
    app = FastAPI(title="ontoalign curation API")

    fields = state.alignments["fields"]
    recommendations = state.alignments["recommendations"]
    member_lists: list[list[int]] = state.clusters["clusters"]

    def decision_view(decision: CurationDecision) -> dict:
        return asdict(decision)

    @app.get("/api/clusters")
    def list_clusters() -> dict:
        latest = journal.latest_by_field()
        views = []
        for cluster_id, members in enumerate(member_lists):
            rec = recommendations[cluster_id] if cluster_id < len(recommendations) else None
            views.append(
                {
                    "id": cluster_id,
                    "size": len(members),
                    "recommendation": rec,
                    "decided": sum(1 for m in members if m in latest),
                }
            )
        return {
            "clusters": views,
            "noise": state.clusters["noise"],
            "stats": state.clusters["stats"],
        }

    @app.get("/api/clusters/{cluster_id}")
    def cluster_detail(cluster_id: int) -> dict:
        if not 0 <= cluster_id < len(member_lists):
            raise HTTPException(status_code=404, detail=f"no cluster {cluster_id}")
        latest = journal.latest_by_field()
        members = []
        for index in member_lists[cluster_id]:
            entry = fields[index]
            decision = latest.get(index)
            members.append(
                {
                    "index": index,
                    "normalized": entry["normalized"],
                    "num_candidates": len(entry["candidates"]),
                    "decision": decision_view(decision) if decision else None,
                }
            )
        return {
            "id": cluster_id,
            "size": len(members),
            "recommendation": recommendations[cluster_id],
            "members": members,
        }

    @app.get("/api/fields/{index}/alignments")
    def field_alignments(index: int) -> dict:
        if not 0 <= index < len(fields):
            raise HTTPException(status_code=404, detail=f"no field {index}")
        latest = journal.latest_by_field().get(index)
        entry = dict(fields[index])
        entry["decision"] = decision_view(latest) if latest else None
        return entry

    @app.post("/api/decisions")
    def post_decision(request: DecisionRequest) -> dict:
        if not 0 <= request.field_index < len(fields):
            raise HTTPException(status_code=404, detail=f"no field {request.field_index}")
        if (request.iri is None) != (request.ontology_id is None):
            raise HTTPException(
                status_code=422, detail="iri and ontology_id must be given together"
            )
        if request.iri is not None:
            candidates = fields[request.field_index]["candidates"]
            if not any(
                c["iri"] == request.iri and c["ontology_id"] == request.ontology_id
                for c in candidates
            ):
                raise HTTPException(
                    status_code=422,
                    detail="chosen term is not among the field's candidates",
                )
        decision = CurationDecision(
            field_index=request.field_index,
            iri=request.iri,
            ontology_id=request.ontology_id,
            note=request.note,
            decided_at=time.time(),
        )
        journal.append(decision)
        return decision_view(decision)

    @app.get("/api/export", response_class=PlainTextResponse)
    def export() -> str:
        lines = [EXPORT_HEADER]
        latest = journal.latest_by_field()
        for index in sorted(latest):
            decision = latest[index]
            if decision.iri is None:
                continue  # rejected-all decisions export nothing
            entry = fields[index]
            label = next(
                (
                    c["label"]
                    for c in entry["candidates"]
                    if c["iri"] == decision.iri and c["ontology_id"] == decision.ontology_id
                ),
                "",
            )
            lines.append(
                f"{entry['normalized']}\t{decision.iri}\t{label}\t{decision.ontology_id}"
            )
        return "\n".join(lines) + "\n"

    @app.get("/api/meta")
    def meta() -> dict:
        return {
            "params": state.report["params"],
            "config_text": state.report["config_text"],
            "corpus_size": state.report["corpus_size"],
            "coverage": state.report["coverage"],
        }

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app


def serve(
    run_dir: Union[str, Path],
    port: int = 8040,
    host: str = "127.0.0.1",
    journal_path: Optional[Union[str, Path]] = None,
    static_dir: Optional[Union[str, Path]] = None,
) -> None:
    """Run the curation server until interrupted."""
    import uvicorn

    app = create_app(run_dir, journal_path=journal_path, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
