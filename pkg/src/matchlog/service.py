"""Local proof-session service.

A thin JSON layer over the proof mode: every endpoint is one call into
:mod:`matchlog.proofmode`, sessions live in memory, and per-session
mutations are serialized (concurrent writers get 409).  Exports re-check on
import, so a crashed service can never corrupt a proof that was written
out.  Binds to loopback by default; this is a desk tool without auth.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Response
from fastapi.responses import JSONResponse, HTMLResponse
from pydantic import BaseModel

from . import theories
from .parser import ParseError, parse_pattern
from .proofjson import encode_proof
from .proofmode import (
    Session, TacticError, apply_tactic_text, new_session, qed, state_json, undo,
)

__all__ = ["create_app"]


class CreateSession(BaseModel):
    theory: str = "DEF"
    goal: str


class TacticRequest(BaseModel):
    tactic: str


@dataclass
class _Slot:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)


def create_app(theory_dirs: tuple[str, ...] = (), snapshot_dir: str | None = None,
               static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="matchlog session service")
    slots: dict[str, _Slot] = {}

    def snapshot(sid: str, slot: _Slot, theory_name: str, goal: str):
        if snapshot_dir is None:
            return
        path = Path(snapshot_dir) / f"{sid}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps({
            "theory": theory_name,
            "goal": goal,
            "script": list(slot.session.script),
        }, indent=1), encoding="utf-8")

    meta: dict[str, tuple[str, str]] = {}

    def not_found():
        return JSONResponse({"error": "unknown session"}, status_code=404)

    @app.get("/theories")
    def list_theories():
        names = sorted(theories.builtin_theories())
        for d in theory_dirs:
            for f in sorted(Path(d).glob("*.mlth")):
                names.append(f.stem)
        return {"theories": names}

    @app.post("/sessions", status_code=201)
    def create(req: CreateSession):
        try:
            th = theories.load_theory(req.theory, theory_dirs)
            goal = parse_pattern(req.goal, th.signature, th.notation_env())
            session = new_session(th, goal)
        except (ParseError, TacticError, FileNotFoundError, ValueError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        sid = uuid.uuid4().hex
        slots[sid] = _Slot(session)
        meta[sid] = (req.theory, req.goal)
        snapshot(sid, slots[sid], *meta[sid])
        return {"id": sid, "state": state_json(session)}

    @app.get("/sessions/{sid}/state")
    def get_state(sid: str):
        slot = slots.get(sid)
        if slot is None:
            return not_found()
        return {"id": sid, "state": state_json(slot.session)}

    @app.post("/sessions/{sid}/tactic")
    def post_tactic(sid: str, req: TacticRequest):
        slot = slots.get(sid)
        if slot is None:
            return not_found()
        if not slot.lock.acquire(blocking=False):
            return JSONResponse(
                {"error": "session is being mutated concurrently"}, status_code=409)
        try:
            try:
                slot.session = apply_tactic_text(slot.session, req.tactic)
            except TacticError as exc:
                return JSONResponse({"error": str(exc)}, status_code=422)
            snapshot(sid, slot, *meta[sid])
            return {"id": sid, "state": state_json(slot.session)}
        finally:
            slot.lock.release()

    @app.post("/sessions/{sid}/undo")
    def post_undo(sid: str):
        slot = slots.get(sid)
        if slot is None:
            return not_found()
        if not slot.lock.acquire(blocking=False):
            return JSONResponse(
                {"error": "session is being mutated concurrently"}, status_code=409)
        try:
            try:
                slot.session = undo(slot.session)
            except TacticError as exc:
                return JSONResponse({"error": str(exc)}, status_code=422)
            snapshot(sid, slot, *meta[sid])
            return {"id": sid, "state": state_json(slot.session)}
        finally:
            slot.lock.release()

    @app.get("/sessions/{sid}/proof")
    def get_proof(sid: str):
        slot = slots.get(sid)
        if slot is None:
            return not_found()
        try:
            thm = qed(slot.session)
        except TacticError as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        return Response(content=encode_proof(thm), media_type="application/json",
                        headers={"Content-Disposition":
                                 'attachment; filename="proof.mlproof"'})

    if static_dir:
        static = Path(static_dir)
        media = {".js": "text/javascript", ".css": "text/css",
                 ".html": "text/html", ".map": "application/json"}

        @app.get("/", response_class=HTMLResponse)
        def index():
            return (static / "index.html").read_text(encoding="utf-8")

        @app.get("/ui/{name}")
        def ui_asset(name: str):
            if "/" in name or "\\" in name or name.startswith("."):
                return JSONResponse({"error": "not found"}, status_code=404)
            path = static / name
            kind = media.get(path.suffix)
            if kind is None or not path.is_file():
                return JSONResponse({"error": "not found"}, status_code=404)
            return Response(path.read_text(encoding="utf-8"), media_type=kind)

    return app
