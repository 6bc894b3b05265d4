"""Flat key/value config files.

One `key = value` pair per line; `#` starts a comment.  Keys are the same
dotted paths used everywhere else (world.width, habits.window, message, ...),
values are parsed as booleans, numbers or strings.  Useful for sharing a
parameter set between CLI runs and sessions.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from .errors import InvalidConfig


def parse_value(text: str) -> Any:
    t = text.strip()
    low = t.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        pass
    return t


def loads(text: str) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise InvalidConfig(f"line {lineno}", "empty key")
        out[key] = parse_value(value)
    return out


def load(path: str | Path) -> dict[str, Any]:
    return loads(Path(path).read_text(encoding="utf-8"))
