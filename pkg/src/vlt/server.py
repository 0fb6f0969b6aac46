"""HTTP+JSON gateway around sessions.

Every mutation returns the full updated state plus the changed-element
list; sessions are persisted to disk after each mutation and lazily
reloaded after a restart.
"""

from __future__ import annotations

import json
from typing import Optional

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from .errors import (
    DesignInputError,
    InfeasibleRule,
    LockedPropertyViolation,
    MalformedXml,
    MinSizeViolation,
    MissingCanvasSize,
    MissingFragment,
    NotAChain,
    UnknownCommand,
    UnknownElement,
    UnmatchedElement,
    UnsupportedTransform,
    VltError,
)
from .optimize import trace_to_csv
from .rules import ruleset_to_json
from .session import Session, SessionStore, create_session

_BAD_REQUEST = (
    DesignInputError,
    MalformedXml,
    MissingCanvasSize,
    UnsupportedTransform,
    UnknownCommand,
    MissingFragment,
    UnknownElement,
)
_CONFLICT = (
    InfeasibleRule,
    NotAChain,
    UnmatchedElement,
    MinSizeViolation,
    LockedPropertyViolation,
)


def create_app(store: Optional[SessionStore] = None) -> FastAPI:
    app = FastAPI(title="vlt", version="0.1.0")
    # the browser UI is served from elsewhere (static files); desk tool, no auth
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.store = store or SessionStore()
    app.state.sessions = {}

    def get_session(session_id: str) -> Session:
        sessions = app.state.sessions
        if session_id not in sessions:
            if not app.state.store.exists(session_id):
                raise KeyError(session_id)
            sessions[session_id] = app.state.store.load(session_id)
        return sessions[session_id]

    @app.exception_handler(VltError)
    async def vlt_error_handler(request: Request, exc: VltError):
        if isinstance(exc, _CONFLICT):
            status = 409
        elif isinstance(exc, _BAD_REQUEST):
            status = 400
        else:
            status = 400
        return JSONResponse(
            status_code=status, content={"error": type(exc).__name__, "detail": str(exc)}
        )

    @app.exception_handler(KeyError)
    async def missing_session_handler(request: Request, exc: KeyError):
        return JSONResponse(status_code=404, content={"error": "UnknownSession", "detail": str(exc)})

    @app.post("/sessions")
    async def post_session(
        a: UploadFile = File(...),
        b: UploadFile = File(...),
        sessionId: Optional[str] = Form(None),
    ):
        svg_a = (await a.read()).decode("utf-8")
        svg_b = (await b.read()).decode("utf-8")
        session = create_session(svg_a, svg_b, session_id=sessionId)
        app.state.sessions[session.session_id] = session
        app.state.store.save(session)
        return session.state_json()

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return get_session(session_id).state_json()

    @app.get("/sessions/{session_id}/rules")
    def get_rules(session_id: str, selection: str = "", canvas: str = "output"):
        session = get_session(session_id)
        ids = [s for s in selection.split(",") if s]
        return ruleset_to_json(session.rules_for(ids, canvas))

    def run_command(session: Session, command: dict) -> dict:
        with session.lock:
            result = session.mutate(command)
            app.state.store.save(session)
            return {"state": session.state_json(), **result}

    @app.post("/sessions/{session_id}/commands")
    async def post_command(session_id: str, request: Request):
        command = await request.json()
        return run_command(get_session(session_id), command)

    @app.post("/sessions/{session_id}/match/override")
    async def post_override(session_id: str, request: Request):
        body = await request.json()
        command = {"type": "override-match", "a": body["a"], "b": body.get("b")}
        return run_command(get_session(session_id), command)

    @app.post("/sessions/{session_id}/optimize")
    async def post_optimize(session_id: str, request: Request):
        body = await request.json()
        command = {"type": "optimize", **body}
        return run_command(get_session(session_id), command)

    @app.post("/sessions/{session_id}/undo")
    def post_undo(session_id: str):
        return run_command(get_session(session_id), {"type": "undo"})

    @app.get("/sessions/{session_id}/export.svg")
    def get_export(session_id: str):
        session = get_session(session_id)
        return Response(content=session.export_svg(), media_type="image/svg+xml")

    @app.get("/sessions/{session_id}/trace.csv")
    def get_trace(session_id: str):
        session = get_session(session_id)
        return PlainTextResponse(trace_to_csv(session.last_trace), media_type="text/csv")

    return app


app = create_app()
