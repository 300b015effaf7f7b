"""HTTP service exposing the pipeline, codebooks and validation workflow.

State is limited to codebooks and validation sessions, both persisted as
JSON files under the configured data directory; a process-wide lock
serializes writes. Everything else delegates to the library modules, so the
service and the CLI share one implementation of the semantics.
"""

from __future__ import annotations

import json
import os
import random
import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .backends.base import BackendSuite
from .codebook import (
    ValidationSession,
    canonical_json,
    code_event,
    export_codebook,
    import_codebook,
)
from .config import DEFAULT_CODEBOOK, DEMO_CORPUS, ToolkitConfig, build_backends
from .corpus import EventRecord, read_corpus
from .errors import (
    BackendUnavailable,
    DuplicateEvent,
    MockLookupMiss,
    PrentError,
    SchemaViolation,
)
from .pipeline import EventDescription, PipelineConfig, Template, run_template


class PrentRequest(BaseModel):
    text: str = Field(min_length=1)
    template_ids: list[str] | None = None
    top_k: int | None = Field(default=None, ge=1)
    threshold: float | None = Field(default=None, ge=0.0, le=1.0)


class CodeRequest(BaseModel):
    text: str | None = Field(default=None, min_length=1)
    corpus_ref: str | None = None
    codebook: str | dict
    top_k: int | None = Field(default=None, ge=1)
    threshold: float | None = Field(default=None, ge=0.0, le=1.0)


class SessionCreate(BaseModel):
    id: str = Field(min_length=1)
    codebook: str = Field(min_length=1)
    corpus_ref: str = "demo"
    seed: int = 0


class SampleRequest(BaseModel):
    n: int = Field(ge=1)


class FeedbackRequest(BaseModel):
    event_id: str = Field(min_length=1)
    accepted: list[str]


class ServiceState:
    """Loaded backends plus file-backed codebook and session stores."""

    def __init__(self, config: ToolkitConfig, backends: BackendSuite):
        self.config = config
        self.backends = backends
        self.lock = threading.Lock()
        self.corpora: dict[str, list[EventRecord]] = {"demo": read_corpus(DEMO_CORPUS)}
        self.codebook_dir = Path(config.data_dir) / "codebooks"
        self.session_dir = Path(config.data_dir) / "sessions"
        self.codebook_dir.mkdir(parents=True, exist_ok=True)
        self.session_dir.mkdir(parents=True, exist_ok=True)
        default = DEFAULT_CODEBOOK.read_text(encoding="utf-8")
        default_name = json.loads(default)["name"]
        if not (self.codebook_dir / f"{default_name}.json").exists():
            self.put_codebook(default_name, json.loads(default))

    def pipeline_config(self, top_k=None, threshold=None) -> PipelineConfig:
        return PipelineConfig(
            top_k=top_k or self.config.top_k,
            entail_threshold=(
                threshold if threshold is not None else self.config.entail_threshold
            ),
        )

    # --- codebooks ---

    def codebook_path(self, name: str) -> Path:
        if "/" in name or "\\" in name or name.startswith("."):
            raise SchemaViolation("invalid codebook name", "name")
        return self.codebook_dir / f"{name}.json"

    def put_codebook(self, name: str, document: dict) -> str:
        document = dict(document)
        document["name"] = name
        codebook = import_codebook(document)
        text = canonical_json(export_codebook(codebook))
        with self.lock:
            self.codebook_path(name).write_text(text, encoding="utf-8")
        return text

    def get_codebook_text(self, name: str) -> str | None:
        path = self.codebook_path(name)
        return path.read_text(encoding="utf-8") if path.exists() else None

    def list_codebooks(self) -> list[str]:
        return sorted(p.stem for p in self.codebook_dir.glob("*.json"))

    # --- sessions ---

    def session_path(self, session_id: str) -> Path:
        if "/" in session_id or "\\" in session_id or session_id.startswith("."):
            raise SchemaViolation("invalid session id", "id")
        return self.session_dir / f"{session_id}.json"

    def load_session(self, session_id: str) -> dict | None:
        path = self.session_path(session_id)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def save_session(self, document: dict) -> None:
        with self.lock:
            self.session_path(document["session"]["id"]).write_text(
                json.dumps(document, indent=2), encoding="utf-8"
            )


def create_app(
    config: ToolkitConfig | None = None, backends: BackendSuite | None = None
) -> FastAPI:
    config = config or ToolkitConfig()
    backends = backends or build_backends(config)
    state = ServiceState(config, backends)
    app = FastAPI(title="prent", version="0.1.0")
    app.state.service = state
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    ui_dir = os.environ.get("PRENT_UI_DIR")
    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    @app.exception_handler(RequestValidationError)
    async def on_invalid(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(SchemaViolation)
    async def on_schema(request: Request, exc: SchemaViolation):
        return JSONResponse(status_code=400, content={"detail": str(exc), "path": exc.path})

    @app.exception_handler(DuplicateEvent)
    async def on_duplicate(request: Request, exc: DuplicateEvent):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(BackendUnavailable)
    async def on_backend_down(request: Request, exc: BackendUnavailable):
        return JSONResponse(status_code=503, content={"detail": str(exc)})

    @app.exception_handler(MockLookupMiss)
    async def on_fixture_miss(request: Request, exc: MockLookupMiss):
        return JSONResponse(status_code=503, content={"detail": str(exc)})

    def default_templates() -> list[Template]:
        document = json.loads(state.get_codebook_text("political-events") or "{}")
        templates = document.get("templates", {})
        return [Template(tid, spec["text"]) for tid, spec in templates.items()]

    def resolve_codebook(ref: str | dict):
        if isinstance(ref, dict):
            return import_codebook(ref)
        text = state.get_codebook_text(ref)
        if text is None:
            return None
        return import_codebook(json.loads(text))

    @app.get("/health")
    def health():
        return {"status": "ok", "backend": state.config.backend}

    @app.get("/templates")
    def templates():
        return {t.id: t.text for t in default_templates()}

    @app.post("/prent")
    def prent_route(request: PrentRequest):
        event = EventDescription(request.text)
        templates = default_templates()
        if request.template_ids is not None:
            by_id = {t.id: t for t in templates}
            unknown = [tid for tid in request.template_ids if tid not in by_id]
            if unknown:
                return JSONResponse(
                    status_code=404, content={"detail": f"unknown templates: {unknown}"}
                )
            templates = [by_id[tid] for tid in request.template_ids]
        threshold = (
            request.threshold if request.threshold is not None
            else state.config.entail_threshold
        )
        # probe at threshold 0 so every candidate reports its entail probability
        probe = state.pipeline_config(request.top_k, 0.0)
        results, errors, failures = {}, {}, []
        for template in templates:
            try:
                _, scored = run_template(event, template, probe, state.backends)
            except PrentError as exc:
                errors[template.id] = str(exc)
                failures.append(exc)
                continue
            results[template.id] = {
                "template_text": template.text,
                "candidates": [
                    {
                        "token": token,
                        "fill_p": fill_p,
                        "entail_p": entail_p,
                        "entailed": entail_p >= threshold,
                    }
                    for token, fill_p, entail_p in scored.entailed
                ],
            }
        if not results and failures and isinstance(
            failures[0], (BackendUnavailable, MockLookupMiss)
        ):
            raise failures[0]
        return {"threshold": threshold, "results": results, "errors": errors}

    @app.post("/code")
    def code_route(request: CodeRequest):
        codebook = resolve_codebook(request.codebook)
        if codebook is None:
            return JSONResponse(status_code=404, content={"detail": "unknown codebook"})
        pipeline_config = state.pipeline_config(request.top_k, request.threshold)
        if request.text is not None:
            types = code_event(
                EventDescription(request.text), codebook, pipeline_config, state.backends
            )
            return {"types": sorted(types)}
        if request.corpus_ref is None:
            return JSONResponse(
                status_code=400, content={"detail": "need either text or corpus_ref"}
            )
        records = state.corpora.get(request.corpus_ref)
        if records is None:
            return JSONResponse(status_code=404, content={"detail": "unknown corpus"})
        coded = [
            {
                "event_id": r.id,
                "types": sorted(
                    code_event(
                        EventDescription(r.description, id=r.id),
                        codebook,
                        pipeline_config,
                        state.backends,
                    )
                ),
            }
            for r in records
        ]
        return {"coded": coded}

    @app.get("/codebooks")
    def list_codebooks():
        return {"codebooks": state.list_codebooks()}

    @app.get("/codebooks/{name}")
    def get_codebook(name: str):
        text = state.get_codebook_text(name)
        if text is None:
            return JSONResponse(status_code=404, content={"detail": "unknown codebook"})
        return Response(content=text, media_type="application/json")

    @app.put("/codebooks/{name}")
    def put_codebook(name: str, document: dict):
        state.put_codebook(name, document)
        return {"stored": name}

    @app.get("/export/codebook/{name}")
    def export_codebook_route(name: str):
        text = state.get_codebook_text(name)
        if text is None:
            return JSONResponse(status_code=404, content={"detail": "unknown codebook"})
        return Response(
            content=text,
            media_type="application/json",
            headers={"Content-Disposition": f'attachment; filename="{name}.json"'},
        )

    @app.post("/sessions")
    def create_session(request: SessionCreate):
        if state.load_session(request.id) is not None:
            return JSONResponse(status_code=409, content={"detail": "session id exists"})
        if state.get_codebook_text(request.codebook) is None:
            return JSONResponse(status_code=404, content={"detail": "unknown codebook"})
        records = state.corpora.get(request.corpus_ref)
        if records is None:
            return JSONResponse(status_code=404, content={"detail": "unknown corpus"})
        queue = [r.id for r in records]
        random.Random(request.seed).shuffle(queue)
        document = {
            "session": ValidationSession(id=request.id, codebook_name=request.codebook
                                         ).to_document(),
            "corpus_ref": request.corpus_ref,
            "seed": request.seed,
            "queue": queue,
            "pending": {},
        }
        state.save_session(document)
        return {"id": request.id, "events_total": len(queue)}

    def _session_or_404(session_id: str):
        document = state.load_session(session_id)
        if document is None:
            return None, JSONResponse(status_code=404, content={"detail": "unknown session"})
        return document, None

    @app.get("/sessions/{session_id}")
    def session_status(session_id: str):
        document, error = _session_or_404(session_id)
        if error:
            return error
        session = ValidationSession.from_document(document["session"])
        return {
            "id": session_id,
            "codebook": session.codebook_name,
            "labeled": len(session.labeled),
            "pending": sorted(document["pending"]),
            "per_class_accuracy": session.per_class_accuracy(),
        }

    @app.post("/sessions/{session_id}/sample")
    def sample(session_id: str, request: SampleRequest):
        document, error = _session_or_404(session_id)
        if error:
            return error
        session = ValidationSession.from_document(document["session"])
        codebook = resolve_codebook(session.codebook_name)
        if codebook is None:
            return JSONResponse(status_code=404, content={"detail": "unknown codebook"})
        records = {r.id: r for r in state.corpora[document["corpus_ref"]]}
        seen = session.seen_ids() | set(document["pending"])
        batch = []
        queue = document["queue"]
        config = state.pipeline_config()
        for event_id in queue:
            if len(batch) >= request.n:
                break
            if event_id in seen:
                continue
            record = records[event_id]
            suggested = sorted(
                code_event(
                    EventDescription(record.description, id=record.id),
                    codebook, config, state.backends,
                )
            )
            document["pending"][event_id] = suggested
            batch.append(
                {"event_id": event_id, "description": record.description,
                 "suggested": suggested}
            )
        state.save_session(document)
        return {"events": batch}

    @app.post("/sessions/{session_id}/feedback")
    def feedback(session_id: str, request: FeedbackRequest):
        document, error = _session_or_404(session_id)
        if error:
            return error
        session = ValidationSession.from_document(document["session"])
        if request.event_id in session.seen_ids():
            raise DuplicateEvent(f"feedback for {request.event_id!r} already recorded")
        if request.event_id not in document["pending"]:
            return JSONResponse(
                status_code=404, content={"detail": "event not pending in this session"}
            )
        records = {r.id: r for r in state.corpora[document["corpus_ref"]]}
        suggested = set(document["pending"].pop(request.event_id))
        accuracy = session.record_feedback(
            request.event_id,
            suggested,
            set(request.accepted),
            description=records[request.event_id].description,
        )
        document["session"] = session.to_document()
        state.save_session(document)
        return {"per_class_accuracy": accuracy, "labeled": len(session.labeled)}

    @app.get("/sessions/{session_id}/export")
    def export_session(session_id: str):
        document, error = _session_or_404(session_id)
        if error:
            return error
        session = ValidationSession.from_document(document["session"])
        return Response(
            content=session.export_jsonl(),
            media_type="application/x-ndjson",
            headers={"Content-Disposition": f'attachment; filename="{session_id}.jsonl"'},
        )

    return app
