"""HTTP annotation service.

Thin JSON layer over :mod:`simpmine.sessions`: create a session, page
through unannotated items with their example sentences, submit Yes/No/Maybe
verdicts, watch the running manual precision, and export verdicts plus the
pairs generated from accepted keys. Errors come back as
``{"error": {"code": ..., "message": ...}}`` with a matching HTTP status.

See API.md at the repository root for the endpoint reference.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .pairgen import summary as pair_summary
from .ranking import RankingUsageError
from .sessions import Session, SessionError, SessionStore, UnknownSessionError


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


class CreateSessionRequest(BaseModel):
    workflow: str
    session_size: int = 200
    examples_per_item: int = 20
    precision_threshold: float = 0.6
    recall_threshold: float = 0.0
    min_words: int = 0
    min_pair_count: int = 1
    seed: int = 0


class VerdictRequest(BaseModel):
    key: str
    value: str
    annotator: str = "expert"


def _session_info(session: Session, types: tuple[str, str]) -> dict:
    return {
        "id": session.id,
        "workflow": session.workflow,
        "size": session.size,
        "cursor": session.cursor,
        "annotated": session.annotated,
        "msp": session.running_msp(),
        "types": list(types),  # placeholder labels used inside the keys
        "params": session.params,
        "verdicts": {k: v.value for k, v in session.latest.items()},
    }


def _stats(session: Session) -> dict:
    return {
        "size": session.size,
        "annotated": session.annotated,
        "remaining": session.size - session.annotated,
        "cursor": session.cursor,
        "msp": session.running_msp(),
        "counts": session.verdict_counts(),
    }


def create_app(store: SessionStore, token: Optional[str] = None,
               ui_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="simpmine annotation service")
    types = (store.index.type_a.upper(), store.index.type_b.upper())
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])

    @app.exception_handler(ApiError)
    async def handle_api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"error": {"code": exc.code, "message": exc.message}})

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(_req: Request, exc: RequestValidationError):
        # keep the one error envelope for framework-level validation too
        return JSONResponse(status_code=422,
                            content={"error": {"code": "validation_error",
                                               "message": str(exc)}})

    def authorize(request: Request) -> None:
        if token is None:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise ApiError(401, "unauthorized", "missing or invalid bearer token")

    def get_session(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except UnknownSessionError as e:
            raise ApiError(404, "unknown_session", str(e)) from e

    @app.get("/health")
    async def health():
        return {"ok": True, "keys": len(store.index.keys()), "records": len(store.index)}

    @app.post("/sessions", status_code=201)
    async def create_session(body: CreateSessionRequest, request: Request):
        authorize(request)
        try:
            session = store.create(
                workflow=body.workflow, session_size=body.session_size,
                examples_per_item=body.examples_per_item,
                precision_threshold=body.precision_threshold,
                recall_threshold=body.recall_threshold,
                min_words=body.min_words, min_pair_count=body.min_pair_count,
                seed=body.seed)
        except RankingUsageError as e:
            raise ApiError(409, "labels_required", str(e)) from e
        except (SessionError, ValueError) as e:
            raise ApiError(400, "invalid_session", str(e)) from e
        return _session_info(session, types)

    @app.get("/sessions")
    async def list_sessions(request: Request):
        authorize(request)
        return {"sessions": [_session_info(store.sessions[sid], types)
                             for sid in sorted(store.sessions)]}

    @app.get("/sessions/{session_id}")
    async def session_info(session_id: str, request: Request):
        authorize(request)
        return _session_info(get_session(session_id), types)

    @app.get("/sessions/{session_id}/queue")
    async def session_queue(session_id: str, request: Request):
        authorize(request)
        session = get_session(session_id)
        items = []
        for position, item in enumerate(session.queue):
            light = {k: v for k, v in item.items() if k != "examples"}
            verdict = session.latest.get(item["key"])
            items.append({"position": position,
                          "verdict": verdict.value if verdict else None, **light})
        return {"items": items}

    @app.get("/sessions/{session_id}/items")
    async def next_items(session_id: str, request: Request, n: int = 10):
        authorize(request)
        if n < 1:
            raise ApiError(400, "invalid_parameter", f"n must be >= 1, got {n}")
        get_session(session_id)
        return {"items": store.next_items(session_id, n)}

    @app.get("/sessions/{session_id}/examples")
    async def item_examples(session_id: str, key: str, request: Request):
        authorize(request)
        session = get_session(session_id)
        for item in session.queue:
            if item["key"] == key:
                return {"key": key, "examples": item["examples"]}
        raise ApiError(400, "key_not_in_queue", f"key not in session queue: {key!r}")

    @app.post("/sessions/{session_id}/verdicts")
    async def submit_verdict(session_id: str, body: VerdictRequest, request: Request):
        authorize(request)
        session = get_session(session_id)
        try:
            store.submit(session_id, body.key, body.value, body.annotator)
        except SessionError as e:
            raise ApiError(400, "key_not_in_queue", str(e)) from e
        except ValueError as e:
            raise ApiError(400, "invalid_verdict", str(e)) from e
        return {"ok": True, **_stats(session)}

    @app.get("/sessions/{session_id}/stats")
    async def session_stats(session_id: str, request: Request):
        authorize(request)
        return _stats(get_session(session_id))

    @app.get("/sessions/{session_id}/export")
    async def export_session(session_id: str, request: Request):
        authorize(request)
        get_session(session_id)
        verdicts, pairs = store.export(session_id)
        return {"verdicts": verdicts,
                "pairs": [g.to_json() for g in pairs],
                "summary": pair_summary(pairs)}

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
