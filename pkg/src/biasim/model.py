"""Shared model plumbing: config construction from override paths and the
parameter surface every model exposes to commands, scripts and UI clients."""

from __future__ import annotations

import dataclasses
from typing import Any, ClassVar

from .errors import InvalidConfig
from .params import ParamRegistry
from .world import World


class ModelBase:
    kind: ClassVar[str]
    Config: ClassVar[type]
    PARAMS: ClassVar[ParamRegistry]
    METRICS: ClassVar[tuple[str, ...]]
    uses_encounters: ClassVar[bool] = False
    extra_agents: ClassVar[int] = 0

    def __init__(self, config):
        self.cfg = config

    # -- configuration ---------------------------------------------------

    @classmethod
    def config_paths(cls) -> dict[str, dataclasses.Field]:
        return {f"{cls.kind}.{f.name}": f for f in dataclasses.fields(cls.Config)}

    @classmethod
    def build_config(cls, overrides: dict[str, Any] | None = None):
        """Construct the model config from ``<kind>.<field>`` override keys."""
        overrides = overrides or {}
        known = cls.config_paths()
        kw = {}
        for key, value in overrides.items():
            f = known.get(key)
            if f is None:
                raise InvalidConfig(key)
            kw[f.name] = _coerce(key, f.type, value)
        try:
            return cls.Config(**kw)
        except (TypeError, ValueError) as exc:
            raise InvalidConfig(cls.kind, str(exc)) from exc

    # -- engine hooks ----------------------------------------------------

    def setup(self, world: World) -> None:
        raise NotImplementedError

    def advance(self, world: World, pairs) -> None:
        raise NotImplementedError

    def metrics(self) -> dict[str, Any]:
        raise NotImplementedError

    def snapshot(self, world: World) -> list[dict]:
        raise NotImplementedError

    # -- runtime parameters ----------------------------------------------

    def apply_command(self, path: str, value: Any) -> None:
        """Apply a validated command; called by the engine between ticks."""
        value = self.PARAMS.validate(path, value)
        self._apply(path, value)

    def _apply(self, path: str, value: Any) -> None:
        raise NotImplementedError


def _coerce(path: str, ftype, value):
    # dataclass field types arrive as strings under `from __future__ import
    # annotations`, so match on name
    tname = ftype if isinstance(ftype, str) else getattr(ftype, "__name__", str(ftype))
    if tname == "bool":
        if isinstance(value, bool):
            return value
        if isinstance(value, (int, float)) and value in (0, 1):
            return bool(value)
        if isinstance(value, str) and value.lower() in ("true", "false"):
            return value.lower() == "true"
        raise InvalidConfig(path, f"expected a boolean, got {value!r}")
    if tname == "int":
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
            raise InvalidConfig(path, f"expected an integer, got {value!r}")
        return int(value)
    if tname == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidConfig(path, f"expected a number, got {value!r}")
        return float(value)
    return value
