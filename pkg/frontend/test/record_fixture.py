"""Regenerate the recorded reactance session used by the UI replay test.

Run from the repository root with the Python package installed:

    python3 frontend/test/record_fixture.py

Captures the full frame stream of a short reactance session (including two
mid-run commands) plus the session's command log and the server-side target
counts per tick, which the view-model test replays and compares against.
"""

import json
from pathlib import Path
from tempfile import TemporaryDirectory

from biasim.session import SessionManager

OUT = Path(__file__).parent / "fixtures" / "reactance-replay.json"

OVERRIDES = {
    "world.population_size": 40,
    "world.width": 15,
    "world.height": 15,
    "world.encounter_radius": 2.5,
    "reactance.initial_mean": 0.7,
    "message": 0.2,
    "reactance_delta": 0.3,
}


def main() -> None:
    with TemporaryDirectory() as tmp:
        manager = SessionManager(log_dir=tmp)
        session = manager.create("reactance", OVERRIDES, seed=11)
        sub, snapshot = manager.subscribe(session.id)
        frames = [snapshot]
        expected = []
        for tick in range(1, 41):
            if tick == 15:
                manager.control(session.id, "set", path="message", value=0.5)
            if tick == 25:
                manager.control(session.id, "set", path="reactance_delta", value=0.05)
            manager.step_session(session)
            frames.append(sub.frames[-1])
            m = frames[-1]["metrics"]
            expected.append({
                "tick": frames[-1]["tick"],
                "convinced": m["convinced_count"],
                "positive": m["positive_count"],
                "negative": m["negative_count"],
            })
        capabilities = session.engine.capabilities()
        log_lines = Path(tmp, f"{session.id}.jsonl").read_text().splitlines()
        manager.close(session.id)

    OUT.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "created": {
            "type": "created",
            "session": session.id,
            "tick": 0,
            "protocol": 1,
            "capabilities": capabilities,
        },
        "frames": frames,
        "target_counts": expected,
        "command_log": [json.loads(l) for l in log_lines],
    }
    OUT.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {OUT} ({len(frames)} frames)")


if __name__ == "__main__":
    main()
