"""HTTP facade for live preference sessions.

A thin adapter over the session engine: create a session, poll the pending
comparison card, submit choices, and introspect the learned utility.  Every
response is flushed to the file-per-session store before it is
acknowledged, so a crash never loses a recorded answer.  Heavy refits run
inside the comparison request (not the submit), keeping submits snappy.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .acquisition import QueryPolicy
from .fitting import FitConfig
from .likelihood import MC_SAMPLES_FIT
from .model import curve_summary
from .session import _STREAM_INTROSPECT, PreferenceSession, derived_seed
from .space import MetricSpace

MAX_METRICS = 16
DEFAULT_PORT = 8789


class CreateSessionRequest(BaseModel):
    metric_names: list[str]
    directions: list[str]
    policy: str = "pair_entropy"
    budget: int
    seed: Optional[int] = None


class PreferenceSubmission(BaseModel):
    query_id: str
    choice: Literal["A", "B", "E"]


@dataclass
class SessionHandle:
    session: PreferenceSession
    metric_names: list[str]
    lock: threading.Lock = field(default_factory=threading.Lock)
    fitting: bool = False


class SessionStore:
    """In-memory index over append-only file-per-session persistence."""

    def __init__(self, data_dir: Path, max_sessions: int = 1024):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.max_sessions = max_sessions
        self._handles: dict[str, SessionHandle] = {}
        self._create_lock = threading.Lock()

    def _doc_path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.json"

    def _meta_path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.meta.json"

    def add(self, handle: SessionHandle) -> None:
        with self._create_lock:
            if len(self._handles) >= self.max_sessions:
                raise HTTPException(status_code=503, detail="session store is full")
            self._handles[handle.session.session_id] = handle
        self.flush(handle)
        self._meta_path(handle.session.session_id).write_text(
            json.dumps({"metric_names": handle.metric_names})
        )

    def flush(self, handle: SessionHandle) -> None:
        """Durably write the session document (atomic replace)."""
        path = self._doc_path(handle.session.session_id)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(handle.session.save())
        tmp.replace(path)

    def get(self, session_id: str) -> SessionHandle:
        handle = self._handles.get(session_id)
        if handle is None:
            doc_path = self._doc_path(session_id)
            meta_path = self._meta_path(session_id)
            if not doc_path.exists():
                raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
            session = PreferenceSession.load(doc_path.read_bytes())
            names = json.loads(meta_path.read_text())["metric_names"] if meta_path.exists() else [
                f"f{i + 1}" for i in range(session.space.n_metrics)
            ]
            handle = SessionHandle(session=session, metric_names=names)
            with self._create_lock:
                self._handles.setdefault(session_id, handle)
                handle = self._handles[session_id]
        return handle

    def export_bytes(self, session_id: str) -> bytes:
        self.get(session_id)
        return self._doc_path(session_id).read_bytes()


def _descriptor(handle: SessionHandle) -> dict:
    s = handle.session
    if s.is_complete:
        phase = "complete"
    elif s.in_initialization:
        phase = "initializing"
    else:
        phase = "active"
    return {
        "session_id": s.session_id,
        "n_metrics": s.space.n_metrics,
        "metric_names": handle.metric_names,
        "directions": [d.value for d in s.space.directions],
        "policy": s.policy.kind.value,
        "budget": s.budget,
        "queries_answered": s.queries_answered,
        "phase": phase,
        "status": "fitting" if handle.fitting else "idle",
        "seed": s.seed,
    }


def create_app(
    data_dir="prefbeta_sessions",
    mc_samples: int = MC_SAMPLES_FIT,
    n_candidates: int = 2048,
    max_sessions: int = 1024,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    """Build the service around one session store.

    mc_samples and n_candidates become the fit and acquisition defaults of
    every session created through this app.
    """
    store = SessionStore(Path(data_dir), max_sessions=max_sessions)
    app = FastAPI(title="prefbeta preference service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.store = store

    @app.post("/sessions")
    def create_session(request: CreateSessionRequest) -> dict:
        n = len(request.metric_names)
        if not 1 <= n <= MAX_METRICS:
            raise HTTPException(status_code=422, detail=f"need 1..{MAX_METRICS} metrics, got {n}")
        if n == 1:
            # no one-metric pair is ever incomparable, so there is nothing
            # a preference session could learn
            raise HTTPException(
                status_code=422,
                detail="one-metric sessions have no incomparable pairs to ask about",
            )
        if len(request.directions) != n:
            raise HTTPException(status_code=422, detail="directions must match metric_names")
        try:
            space = MetricSpace(request.directions)
            policy = QueryPolicy(kind=request.policy, n_candidates=n_candidates)
            seed = (
                request.seed
                if request.seed is not None
                else int.from_bytes(os.urandom(4), "big")
            )
            session = PreferenceSession(
                space=space,
                policy=policy,
                budget=request.budget,
                fit_config=FitConfig(mc_samples=mc_samples),
                seed=seed,
            )
        except (ValueError, RuntimeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        handle = SessionHandle(session=session, metric_names=list(request.metric_names))
        store.add(handle)
        return _descriptor(handle)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return _descriptor(store.get(session_id))

    @app.get("/sessions/{session_id}/comparison")
    def get_comparison(session_id: str) -> dict:
        handle = store.get(session_id)
        with handle.lock:
            s = handle.session
            if s.is_complete:
                raise HTTPException(status_code=409, detail="session is complete")
            handle.fitting = not s.in_initialization and s.pending_query is None
            try:
                pair = s.next_query()
            finally:
                handle.fitting = False
            names = handle.metric_names
            return {
                "query_id": f"q-{s.queries_answered}",
                "a": {name: float(v) for name, v in zip(names, pair.a)},
                "b": {name: float(v) for name, v in zip(names, pair.b)},
                "queries_answered": s.queries_answered,
                "budget": s.budget,
            }

    @app.post("/sessions/{session_id}/preference")
    def submit_preference(session_id: str, body: PreferenceSubmission) -> dict:
        handle = store.get(session_id)
        with handle.lock:
            s = handle.session
            if s.is_complete:
                raise HTTPException(status_code=409, detail="session is complete")
            if s.pending_query is None or body.query_id != f"q-{s.queries_answered}":
                raise HTTPException(
                    status_code=409,
                    detail=f"stale or unknown query_id {body.query_id!r}",
                )
            s.record_response(body.choice)
            store.flush(handle)
            return _descriptor(handle)

    @app.get("/sessions/{session_id}/model")
    def get_model(session_id: str) -> dict:
        handle = store.get(session_id)
        with handle.lock:
            s = handle.session
            if s.is_complete and not s.is_finalized:
                handle.fitting = True
                try:
                    s.finalize()
                finally:
                    handle.fitting = False
            intro_seed = derived_seed(s.seed, _STREAM_INTROSPECT)
            curves = []
            for i, name in enumerate(handle.metric_names):
                summary = curve_summary(s.theta_mle, i, s.space, seed=intro_seed)
                curves.append({"metric": i, "name": name, **summary.to_dict()})
            return {
                "theta": s.theta_mle.to_dict(),
                "curves": curves,
                "log_likelihood": None if s.last_fit is None else s.last_fit.log_likelihood,
                "prior_only": s.n_fits == 0,
            }

    @app.get("/sessions/{session_id}/export")
    def export_session(session_id: str) -> Response:
        return Response(
            content=store.export_bytes(session_id), media_type="application/json"
        )

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
