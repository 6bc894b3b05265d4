"""WebSocket session service and static host for the web UI.

Wire protocol (schema version 1, JSON text messages):

client -> server
    {"type": "create", "model": "habits|reactance|halo",
     "overrides": {path: value, ...}, "seed": 42, "tick_rate": 10}
    {"type": "control", "session": id, "verb": "play" | "pause"}
    {"type": "control", "session": id, "verb": "step", "n": 1}
    {"type": "control", "session": id, "verb": "set", "path": p, "value": v}
    {"type": "control", "session": id, "verb": "action", "name": p, "value": v?}
    {"type": "subscribe", "session": id}

server -> client
    {"type": "created", "session": id, "tick": 0, "capabilities": {...}}
    {"type": "ack", "session": id, "verb": ..., "tick"|"applies_at": ...}
    {"type": "subscribed", "session": id, "tick": t}
    {"type": "frame", "session": id, "tick": t, "metrics": {...}, "agents": [...]}
    {"type": "error", "code": ..., "message": ..., "path"?: ...}

Set/action acks carry the tick the change applies at; a change acknowledged
for tick T is visible in frame T and never in frame T-1.
"""

from __future__ import annotations

import asyncio
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from . import scenario
from .errors import (InvalidConfig, SimError, UnknownParameter, UnknownSession,
                     ValueOutOfRange)
from .session import SessionManager

PROTOCOL_VERSION = 1


def _error_payload(exc: Exception) -> dict:
    code = {
        UnknownSession: "unknown_session",
        UnknownParameter: "unknown_parameter",
        ValueOutOfRange: "value_out_of_range",
        InvalidConfig: "invalid_config",
    }.get(type(exc), "error")
    payload = {"type": "error", "code": code, "message": str(exc)}
    path = getattr(exc, "path", None)
    if path is not None:
        payload["path"] = path
    return payload


def default_ui_dir() -> Path | None:
    # repo layout: frontend/ next to the installed source tree (editable installs)
    here = Path(__file__).resolve()
    for base in (here.parents[2], *here.parents):
        candidate = base / "frontend"
        if (candidate / "index.html").is_file():
            return candidate
    return None


def create_app(log_dir: str | None = None, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="biasim session service")
    manager = SessionManager(log_dir=log_dir)
    app.state.manager = manager

    @app.get("/api/scenarios")
    def list_scenarios():
        out = []
        for name in scenario.builtin_names():
            s = scenario.load_builtin(name)
            out.append({
                "name": s.name,
                "model": s.model,
                "description": s.description,
                "overrides": s.overrides(),
                "seed": s.base_seed,
            })
        return out

    @app.get("/api/health")
    def health():
        return {"ok": True, "protocol": PROTOCOL_VERSION}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        send_lock = asyncio.Lock()
        tasks: list[asyncio.Task] = []
        subscriptions: list[tuple[str, object]] = []

        async def send(payload: dict) -> None:
            async with send_lock:
                await ws.send_json(payload)

        def spawn(coro) -> None:
            tasks.append(asyncio.get_running_loop().create_task(coro))

        async def play_loop(session) -> None:
            while session.playing:
                manager.step_session(session)
                await asyncio.sleep(1.0 / max(session.tick_rate, 0.001))

        try:
            while True:
                msg = await ws.receive_json()
                try:
                    await _dispatch(msg, manager, send, spawn, subscriptions, play_loop)
                except SimError as exc:
                    await send(_error_payload(exc))
                except (KeyError, TypeError, ValueError) as exc:
                    await send({"type": "error", "code": "bad_message",
                                "message": f"malformed message: {exc}"})
        except WebSocketDisconnect:
            pass
        finally:
            for sid, sub in subscriptions:
                manager.unsubscribe(sid, sub)
            for t in tasks:
                t.cancel()

    ui = Path(ui_dir) if ui_dir else default_ui_dir()
    if ui is not None and ui.is_dir():
        app.mount("/", StaticFiles(directory=str(ui), html=True), name="ui")
    return app


async def _dispatch(msg, manager: SessionManager, send, spawn, subscriptions, play_loop):
    mtype = msg.get("type")
    if mtype == "create":
        session = manager.create(
            model=msg["model"],
            overrides=msg.get("overrides") or {},
            seed=int(msg.get("seed", 42)),
            tick_rate=float(msg.get("tick_rate", 10.0)),
        )
        await send({
            "type": "created",
            "session": session.id,
            "tick": session.engine.tick,
            "protocol": PROTOCOL_VERSION,
            "capabilities": session.engine.capabilities(),
        })
    elif mtype == "control":
        sid = msg["session"]
        verb = msg["verb"]
        session = manager.get(sid)
        was_playing = session.playing
        ack = manager.control(
            sid, verb,
            path=msg.get("path") or msg.get("name"),
            value=msg.get("value"),
            n=msg.get("n", 1),
        )
        if verb == "play" and not was_playing:
            spawn(play_loop(session))
        await send(ack)
    elif mtype == "subscribe":
        sid = msg["session"]
        sub, snapshot = manager.subscribe(sid)
        subscriptions.append((sid, sub))
        await send({"type": "subscribed", "session": sid, "tick": snapshot["tick"]})
        await send(snapshot)
        spawn(_make_pump(sub, send))
    else:
        await send({"type": "error", "code": "bad_message",
                    "message": f"unknown message type {mtype!r}"})


def _make_pump(sub, send):
    async def pump():
        event = asyncio.Event()
        sub.notify = event.set
        if sub.frames:
            event.set()
        while True:
            await event.wait()
            event.clear()
            while sub.frames:
                await send(sub.frames.popleft())
    return pump()
