"""Session API for live play: HTTP + JSON, events over server-sent events.

Sessions live in memory, one lock each; requests against the same session
serialize on that lock while distinct sessions stay fully concurrent. The
event stream replays from tick 0 and then follows until the session ends,
emitting exactly the events-jsonl lines, so stream and export stay
byte-equivalent modulo SSE framing.
"""

from __future__ import annotations

import asyncio
import enum
import itertools
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import dispatcher as disp
from . import game, usersim
from .memory import Emotion
from .personality import OutOfRange, PersonalityVector


class CreateSessionBody(BaseModel):
    personality: list[float] = Field(min_length=3, max_length=3)
    speaking: bool = True
    seed: int = 0
    profile: str = "reactive"
    horizon: int = 40


class MoveBody(BaseModel):
    row: int
    col: int


class PerceptionBody(BaseModel):
    emotion: str
    attentive: bool = True


class Status(enum.Enum):
    RUNNING = "running"
    WAITING_HUMAN = "waiting_human"
    ENDED = "ended"


class LiveSession:
    def __init__(self, session_id: str, session: disp.Session):
        self.id = session_id
        self.session = session
        self.lock = threading.Lock()

    @property
    def status(self) -> Status:
        if self.session.ended:
            return Status.ENDED
        if self.session.waiting_for_human:
            return Status.WAITING_HUMAN
        return Status.RUNNING


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, LiveSession] = {}
        self._counter = itertools.count(1)
        self._lock = threading.Lock()

    def create(self, session: disp.Session) -> LiveSession:
        with self._lock:
            sid = f"s{next(self._counter):06d}"
            live = LiveSession(sid, session)
            self._sessions[sid] = live
            return live

    def get(self, sid: str) -> LiveSession:
        try:
            return self._sessions[sid]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no session '{sid}'") from None

    def snapshot_all(self, directory: str) -> None:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        for sid, live in self._sessions.items():
            log = disp.make_log(live.session)
            (out / f"{sid}.jsonl").write_text(disp.export_events_jsonl(log), encoding="utf-8")


def create_app(store: SessionStore | None = None, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="blockmate session service")
    app.state.store = store or SessionStore()

    def _store() -> SessionStore:
        return app.state.store

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        try:
            p = PersonalityVector(*body.personality)
        except OutOfRange as e:
            raise HTTPException(status_code=400, detail=str(e))
        try:
            cfg = disp.SessionConfig(
                personality=p,
                speaking=body.speaking,
                mode=disp.Mode.LIVE,
                seed=body.seed,
                profile=body.profile,
                horizon=body.horizon,
            )
            session = disp.new_session(cfg)
        except Exception as e:
            raise HTTPException(status_code=400, detail=str(e))
        live = _store().create(session)
        return {"id": live.id, "status": live.status.value}

    @app.get("/sessions/{sid}")
    def get_state(sid: str):
        live = _store().get(sid)
        with live.lock:
            s = live.session
            return {
                "id": live.id,
                "board": s.board.serialize(),
                "turn": s.turn,
                "comfort": {t.letter: s.comfort.signed(t) for t in s.comfort.active_traits},
                "thresholds": {
                    t.letter: (s.cfg.comfort.threshold if s.personality.weight(t) > 0 else -s.cfg.comfort.threshold)
                    for t in s.comfort.active_traits
                },
                "last_utterance": s.utterances[-1] if s.utterances else None,
                "status": live.status.value,
                "speaking": s.cfg.speaking,
                "tick": s._tick,
            }

    @app.post("/sessions/{sid}/move")
    def post_human_move(sid: str, body: MoveBody):
        live = _store().get(sid)
        with live.lock:
            s = live.session
            if s.ended:
                raise HTTPException(status_code=410, detail="session ended")
            if not s.waiting_for_human:
                raise HTTPException(status_code=409, detail="not your turn")
            try:
                s.queue_human_move((body.row, body.col))
            except game.CellOccupied as e:
                raise HTTPException(status_code=422, detail=str(e))
            except game.IllegalPlacement as e:
                raise HTTPException(status_code=422, detail=str(e))
            except ValueError as e:
                raise HTTPException(status_code=422, detail=str(e))
            return {"ok": True}

    @app.post("/sessions/{sid}/perception")
    def post_perception(sid: str, body: PerceptionBody):
        live = _store().get(sid)
        with live.lock:
            s = live.session
            try:
                emotion = Emotion.parse(body.emotion)
            except ValueError as e:
                raise HTTPException(status_code=422, detail=str(e))
            try:
                s.inject_perception(emotion, body.attentive)
            except usersim.NotLiveSession as e:
                raise HTTPException(status_code=409, detail=str(e))
            return {"ok": True}

    @app.post("/sessions/{sid}/advance")
    def advance(sid: str):
        live = _store().get(sid)
        with live.lock:
            s = live.session
            if s.ended:
                raise HTTPException(status_code=410, detail="session ended")
            events = s.step()
            return {
                "status": live.status.value,
                "events": [_event_doc(ev) for ev in events],
            }

    @app.get("/sessions/{sid}/events")
    async def event_stream(sid: str):
        live = _store().get(sid)

        async def gen():
            sent = 0
            while True:
                with live.lock:
                    events = list(live.session.events[sent:])
                    ended = live.session.ended
                for ev in events:
                    yield f"data: {ev.to_json()}\n\n".encode()
                    sent += 1
                if ended and sent >= len(live.session.events):
                    break
                await asyncio.sleep(0.05)

        return StreamingResponse(gen(), media_type="text/event-stream")

    @app.get("/sessions/{sid}/export")
    def export(sid: str, format: str = "events-jsonl"):
        live = _store().get(sid)
        with live.lock:
            log = disp.make_log(live.session)
            try:
                text = disp.export_trace(log, format)
            except ValueError as e:
                raise HTTPException(status_code=422, detail=str(e))
        media = "application/json" if format == "summary" else "text/plain"
        return StreamingResponse(iter([text]), media_type=media)

    if static_dir and Path(static_dir).is_dir():
        @app.get("/")
        def index():
            return FileResponse(Path(static_dir) / "index.html")

        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def _event_doc(ev: disp.SessionEvent) -> dict:
    return {"tick": ev.tick, "kind": ev.kind, "t": round(ev.t, 6), **ev.payload}
