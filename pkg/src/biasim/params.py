"""Runtime parameter registry and the tick-boundary command queue.

Every model publishes the parameter paths a user may touch while a run is
live: sliders ("number"), switches ("toggle") and buttons ("action").  The
same registry backs scenario validation, CLI overrides and the capabilities
message sent to UI clients, so there is a single source of truth for what a
path means and which values it accepts.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import UnknownParameter, ValueOutOfRange


@dataclass(frozen=True)
class ParamSpec:
    path: str
    kind: str                      # "number" | "toggle" | "action"
    lo: float | None = None
    hi: float | None = None
    label: str = ""
    takes_value: bool = False      # actions only: whether a value is expected


class ParamRegistry:
    def __init__(self, specs: list[ParamSpec], dynamic: Callable[[str], ParamSpec | None] | None = None):
        self._specs = {s.path: s for s in specs}
        self._dynamic = dynamic

    def lookup(self, path: str) -> ParamSpec:
        spec = self._specs.get(path)
        if spec is None and self._dynamic is not None:
            spec = self._dynamic(path)
        if spec is None:
            raise UnknownParameter(path)
        return spec

    def validate(self, path: str, value: Any) -> Any:
        """Check (path, value) and return the normalised value."""
        spec = self.lookup(path)
        if spec.kind == "toggle":
            return _as_bool(path, value)
        if spec.kind == "number" or (spec.kind == "action" and spec.takes_value):
            v = _as_number(path, value)
            if spec.kind == "number":
                if spec.lo is not None and v < spec.lo:
                    raise ValueOutOfRange(path, value, spec.lo, spec.hi)
                if spec.hi is not None and v > spec.hi:
                    raise ValueOutOfRange(path, value, spec.lo, spec.hi)
            return v
        # plain action: value ignored
        return None

    def describe(self) -> list[dict]:
        """Control descriptors for the capabilities message, in declaration order."""
        out = []
        for s in self._specs.values():
            d = {"path": s.path, "kind": s.kind, "label": s.label or s.path}
            if s.lo is not None:
                d["min"] = s.lo
            if s.hi is not None:
                d["max"] = s.hi
            if s.kind == "action":
                d["takes_value"] = s.takes_value
            out.append(d)
        return out


def _as_bool(path: str, value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)) and value in (0, 1):
        return bool(value)
    if isinstance(value, str) and value.lower() in ("true", "false", "on", "off"):
        return value.lower() in ("true", "on")
    raise ValueOutOfRange(path, value)


def _as_number(path: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueOutOfRange(path, value)
    v = float(value)
    if v != v or v in (float("inf"), float("-inf")):
        raise ValueOutOfRange(path, value)
    return v


@dataclass(order=True)
class Command:
    """A parameter change or action applied at a tick boundary."""
    tick: int
    seq: int
    path: str = field(compare=False)
    value: Any = field(compare=False, default=None)


class CommandQueue:
    """Commands ordered by (tick, submission order)."""

    def __init__(self):
        self._heap: list[Command] = []
        self._seq = 0

    def push(self, tick: int, path: str, value: Any = None) -> Command:
        cmd = Command(tick, self._seq, path, value)
        self._seq += 1
        heapq.heappush(self._heap, cmd)
        return cmd

    def due(self, tick: int) -> list[Command]:
        """Pop every command scheduled at or before ``tick``, in order."""
        out = []
        while self._heap and self._heap[0].tick <= tick:
            out.append(heapq.heappop(self._heap))
        return out

    def __len__(self) -> int:
        return len(self._heap)
