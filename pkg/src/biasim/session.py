"""Live simulation sessions: play/pause/step, parameter commands, frame
subscriptions and a persisted command log that makes every run replayable.

The manager is transport-agnostic and synchronous; the websocket layer in
:mod:`biasim.server` drives it.  One session owns one engine; commands are
serialized into the engine's queue and always apply at tick boundaries, so
the frame stream is a pure function of (model, overrides, seed, command log).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .engine import Engine
from .errors import InvalidConfig, UnknownSession

COALESCE_LIMIT = 256  # queued frames per subscriber before agent payloads are dropped


class Subscriber:
    """Buffered frame stream for one client.

    Slow consumers never lose metrics: when the buffer backs up, older queued
    frames are coalesced by dropping their agent snapshots (the newest frame
    always keeps a full snapshot).
    """

    def __init__(self, limit: int = COALESCE_LIMIT):
        self.frames: deque[dict] = deque()
        self.limit = limit
        self.notify: Callable[[], None] | None = None

    def push(self, frame: dict) -> None:
        self.frames.append(frame)
        if len(self.frames) > self.limit:
            for f in list(self.frames)[:-1]:
                f.pop("agents", None)
        if self.notify is not None:
            self.notify()


@dataclass
class Session:
    id: str
    engine: Engine
    playing: bool = False
    tick_rate: float = 10.0
    subscribers: list[Subscriber] = field(default_factory=list)
    log_file: Any = None


class SessionManager:
    def __init__(self, log_dir: str | Path | None = None):
        self._sessions: dict[str, Session] = {}
        self._counter = 0
        self.log_dir = Path(log_dir) if log_dir else None
        if self.log_dir:
            self.log_dir.mkdir(parents=True, exist_ok=True)

    # -- lifecycle ---------------------------------------------------------

    def create(self, model: str, overrides: dict | None = None, seed: int = 42,
               tick_rate: float = 10.0) -> Session:
        engine = Engine(model, overrides, seed=seed)
        self._counter += 1
        sid = f"s{self._counter}"
        session = Session(id=sid, engine=engine, tick_rate=float(tick_rate))
        if self.log_dir:
            session.log_file = (self.log_dir / f"{sid}.jsonl").open("w", encoding="utf-8")
            self._log(session, {
                "type": "create", "model": model, "overrides": overrides or {},
                "seed": seed, "tick_rate": tick_rate,
            })
        self._sessions[sid] = session
        return session

    def get(self, sid: str) -> Session:
        session = self._sessions.get(sid)
        if session is None:
            raise UnknownSession(sid)
        return session

    def close(self, sid: str) -> None:
        session = self._sessions.pop(sid, None)
        if session and session.log_file:
            session.log_file.close()

    # -- control -----------------------------------------------------------

    def control(self, sid: str, verb: str, path: str | None = None,
                value: Any = None, n: int = 1) -> dict:
        """Apply a control verb; returns the acknowledgement payload."""
        session = self.get(sid)
        engine = session.engine
        if verb == "play":
            session.playing = True
            self._log(session, {"verb": "play", "tick": engine.tick})
            return {"type": "ack", "session": sid, "verb": verb, "tick": engine.tick}
        if verb == "pause":
            session.playing = False
            self._log(session, {"verb": "pause", "tick": engine.tick})
            return {"type": "ack", "session": sid, "verb": verb, "tick": engine.tick}
        if verb == "step":
            n = max(1, int(n))
            for _ in range(n):
                self.step_session(session)
            return {"type": "ack", "session": sid, "verb": verb, "tick": engine.tick}
        if verb in ("set", "action"):
            cmd = engine.submit(path, value)
            self._log(session, {"verb": verb, "path": path, "value": value,
                                "applies_at": cmd.tick})
            return {"type": "ack", "session": sid, "verb": verb, "path": path,
                    "applies_at": cmd.tick}
        raise InvalidConfig("verb", f"unknown control verb {verb!r}")

    def step_session(self, session: Session) -> dict:
        """Advance one tick and fan the frame out to subscribers."""
        session.engine.step()
        self._log(session, {"t": session.engine.tick})
        frame = self._frame_message(session)
        for sub in session.subscribers:
            sub.push(dict(frame))
        return frame

    def subscribe(self, sid: str) -> tuple[Subscriber, dict]:
        """Register a subscriber; returns it plus a full snapshot of the
        current tick so late joiners start from complete state."""
        session = self.get(sid)
        sub = Subscriber()
        session.subscribers.append(sub)
        return sub, self._frame_message(session)

    def unsubscribe(self, sid: str, sub: Subscriber) -> None:
        session = self._sessions.get(sid)
        if session and sub in session.subscribers:
            session.subscribers.remove(sub)

    def _frame_message(self, session: Session) -> dict:
        frame = session.engine.frame()
        frame["type"] = "frame"
        frame["session"] = session.id
        return frame

    def _log(self, session: Session, entry: dict) -> None:
        if session.log_file:
            session.log_file.write(json.dumps(entry) + "\n")
            session.log_file.flush()


def replay(log_path: str | Path) -> list[dict]:
    """Re-run a session command log; returns the per-tick metrics frames.

    The log's create header pins (model, overrides, seed); command entries
    re-apply at their recorded ticks, so the frames reproduce the original
    session exactly.
    """
    lines = Path(log_path).read_text(encoding="utf-8").splitlines()
    header = json.loads(lines[0])
    if header.get("type") != "create":
        raise InvalidConfig("log", "first entry must be the create header")
    engine = Engine(header["model"], header.get("overrides") or {}, seed=header.get("seed"))
    frames = []
    for line in lines[1:]:
        entry = json.loads(line)
        if "t" in entry:
            frames.append(engine.step())
        elif entry.get("verb") in ("set", "action"):
            engine.submit(entry["path"], entry.get("value"), tick=entry["applies_at"])
    return frames
