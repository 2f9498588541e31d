"""HTTP facade over the session engine.

Exposes catalog/score upload and a turn-based session protocol under /v1.
State lives in process memory; each session carries its own lock so
concurrent answers to one session serialize instead of racing. All error
bodies have the shape {"code": ..., "message": ...}.
"""

from __future__ import annotations

import secrets
import threading
from typing import Any

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .catalog import Catalog, CatalogError, catalog_from_dict
from .policy import PolicyConfig
from .scorer import ScoreError, ScoreVector, cold_start_scores, make_scores
from .session import (
    ACTIVE,
    Answer,
    AnswerError,
    SessionEngine,
    remaining,
    uncertainty,
    write_transcripts,
)

COLD_START = "cold_start"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _not_found(what: str, key: str) -> ApiError:
    return ApiError(404, "not_found", f"unknown {what} {key!r}")


class _LiveSession:
    def __init__(self, engine: SessionEngine, catalog_id: str):
        self.engine = engine
        self.catalog_id = catalog_id
        self.lock = threading.Lock()


def _builtin_catalogs() -> dict[str, Catalog]:
    """Small demo catalogs so the UI works against a fresh server."""
    s2 = catalog_from_dict(
        {
            "attributes": [
                {"name": "color", "kind": "discrete", "values": ["r", "b"], "query_style": "value_query"}
            ],
            "items": [
                {"id": "v1", "values": {"color": "r"}},
                {"id": "v2", "values": {"color": "r"}},
                {"id": "v3", "values": {"color": "b"}},
                {"id": "v4", "values": {"color": "b"}},
            ],
        }
    )
    hotels = catalog_from_dict(
        {
            "attributes": [
                {"name": "level", "kind": "discrete", "values": [3, 4, 5], "query_style": "value_query"},
                {"name": "shower", "kind": "discrete", "values": ["no", "yes"], "query_style": "value_query"},
                {"name": "area", "kind": "discrete", "values": ["beach", "center", "hills"], "query_style": "id_query"},
                {"name": "price", "kind": "continuous", "query_style": "threshold_query"},
            ],
            "items": [
                {"id": "h01", "values": {"level": 3, "shower": "no", "area": "center", "price": 80.0}},
                {"id": "h02", "values": {"level": 3, "shower": "yes", "area": "center", "price": 110.0}},
                {"id": "h03", "values": {"level": 3, "shower": "yes", "area": "beach", "price": 140.0}},
                {"id": "h04", "values": {"level": 4, "shower": "yes", "area": "beach", "price": 190.0}},
                {"id": "h05", "values": {"level": 4, "shower": "no", "area": "hills", "price": 150.0}},
                {"id": "h06", "values": {"level": 4, "shower": "yes", "area": "center", "price": 210.0}},
                {"id": "h07", "values": {"level": 5, "shower": "yes", "area": "beach", "price": 320.0}},
                {"id": "h08", "values": {"level": 5, "shower": "yes", "area": "hills", "price": 280.0}},
            ],
        }
    )
    return {"s2": s2, "hotels": hotels}


def create_app(*, transcripts_path: str | None = None, builtin: bool = True) -> FastAPI:
    app = FastAPI(title="querycore", docs_url=None, redoc_url=None, openapi_url=None)

    catalogs: dict[str, Catalog] = _builtin_catalogs() if builtin else {}
    scores: dict[str, tuple[str, ScoreVector]] = {}
    sessions: dict[str, _LiveSession] = {}
    store_lock = threading.Lock()

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content={"code": exc.code, "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"code": "bad_request", "message": str(exc)})

    @app.get("/v1/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.get("/v1/catalogs")
    def list_catalogs() -> dict:
        with store_lock:
            rows = [
                {"catalog_id": cid, "n_items": c.n_items, "n_attrs": c.n_attrs}
                for cid, c in sorted(catalogs.items())
            ]
        return {"catalogs": rows}

    @app.get("/v1/catalogs/{catalog_id}")
    def get_catalog(catalog_id: str) -> dict:
        # the chat UI needs attribute schemas (declared values) to draw pickers
        with store_lock:
            catalog = catalogs.get(catalog_id)
        if catalog is None:
            raise _not_found("catalog", catalog_id)
        body = catalog.to_dict()
        body["catalog_id"] = catalog_id
        return body

    @app.post("/v1/catalogs", status_code=201)
    def upload_catalog(payload: dict = Body(...)) -> dict:
        try:
            catalog = catalog_from_dict(payload)
        except (CatalogError, TypeError, KeyError) as exc:
            raise ApiError(400, "bad_catalog", str(exc))
        cid = "c-" + secrets.token_hex(8)
        with store_lock:
            catalogs[cid] = catalog
        return {"catalog_id": cid, "n_items": catalog.n_items, "n_attrs": catalog.n_attrs}

    @app.post("/v1/scores", status_code=201)
    def upload_scores(payload: dict = Body(...)) -> dict:
        catalog_id = payload.get("catalog_id")
        mapping = payload.get("scores")
        with store_lock:
            catalog = catalogs.get(catalog_id)
        if catalog is None:
            raise _not_found("catalog", str(catalog_id))
        if not isinstance(mapping, dict):
            raise ApiError(400, "bad_scores", "scores must be an object of item_id -> score")
        try:
            vector = make_scores(catalog, mapping)
        except (ScoreError, TypeError) as exc:
            raise ApiError(400, "bad_scores", str(exc))
        sid = "sc-" + secrets.token_hex(8)
        with store_lock:
            scores[sid] = (catalog_id, vector)
        return {"scores_id": sid, "n_items": catalog.n_items}

    @app.post("/v1/sessions", status_code=201)
    def open_session(payload: dict = Body(...)) -> dict:
        catalog_id = payload.get("catalog_id")
        with store_lock:
            catalog = catalogs.get(catalog_id)
        if catalog is None:
            raise _not_found("catalog", str(catalog_id))

        scores_id = payload.get("scores_id", COLD_START)
        if scores_id == COLD_START:
            vector = cold_start_scores(catalog)
        else:
            with store_lock:
                entry = scores.get(scores_id)
            if entry is None:
                raise _not_found("scores", str(scores_id))
            if entry[0] != catalog_id:
                raise ApiError(400, "bad_request", "scores were uploaded for a different catalog")
            vector = entry[1]

        k_max = payload.get("k_max", 5)
        if not isinstance(k_max, int) or isinstance(k_max, bool) or k_max < 1:
            raise ApiError(400, "bad_request", "k_max must be a positive integer")
        try:
            cfg = PolicyConfig(
                policy=payload.get("policy", "core"),
                mode=payload.get("mode", "catalog"),
            )
        except ValueError as exc:
            raise ApiError(400, "bad_request", str(exc))

        session_id = "sess-" + secrets.token_hex(16)
        engine = SessionEngine(catalog, vector, cfg, k_max, session_id=session_id)
        live = _LiveSession(engine, catalog_id)
        with store_lock:
            sessions[session_id] = live
        with live.lock:
            body = _snapshot(live)
            body["first_query"] = body.pop("pending_query")
        return body

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        live = _live(session_id)
        with live.lock:
            body = _snapshot(live)
            body["events"] = [e.to_dict() for e in live.engine.events]
        return body

    @app.post("/v1/sessions/{session_id}/answers")
    def post_answer(session_id: str, payload: dict = Body(...)) -> dict:
        live = _live(session_id)
        kind = payload.get("kind")
        if kind not in ("yes", "no", "value", "not_care"):
            raise ApiError(400, "bad_request", f"unknown answer kind {kind!r}")
        if kind == "value" and "value" not in payload:
            raise ApiError(400, "bad_request", "a value answer needs a value")
        answer = Answer(kind, payload.get("value"))

        with live.lock:
            engine = live.engine
            if engine.state.status != ACTIVE:
                raise ApiError(410, "session_over", f"session is {engine.state.status}")
            try:
                engine.submit(answer)
            except AnswerError as exc:
                raise ApiError(409, "inadmissible", str(exc))
            # budget spent and still active: recommend instead of asking on
            if engine.state.status == ACTIVE and engine.is_forced_pending:
                engine.abandon_forced()
            body = _snapshot(live)
            body["event"] = engine.events[-1].to_dict()
            if engine.state.status != ACTIVE and transcripts_path:
                write_transcripts(transcripts_path, [engine.transcript()], append=True)
        return body

    def _live(session_id: str) -> _LiveSession:
        with store_lock:
            live = sessions.get(session_id)
        if live is None:
            raise _not_found("session", session_id)
        return live

    def _snapshot(live: _LiveSession) -> dict[str, Any]:
        engine = live.engine
        state = engine.state
        body: dict[str, Any] = {
            "session_id": engine.session_id,
            "catalog_id": live.catalog_id,
            "status": state.status,
            "turn": state.turn,
            "k_max": engine.k_max,
            "policy": engine.cfg.policy,
            "mode": engine.cfg.mode,
            "remaining": remaining(state),
            "uncertainty": uncertainty(state, engine.scores),
            "initial_uncertainty": engine.initial_uncertainty,
        }
        if state.status == ACTIVE:
            action = engine.pending_action
            body["pending_query"] = action.to_dict() if action else None
        else:
            body["pending_query"] = None
            body["outcome"] = engine.outcome().to_dict()
        return body

    return app
