"""Couples a world, a model and a command queue into a deterministic run.

One engine is one run: sequential, single-threaded, advanced one tick at a
time.  Commands are validated on submission and applied atomically at tick
boundaries, before movement and agent updates, so a change scheduled for tick
T is visible in frame T and never in frame T-1.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .errors import InvalidConfig
from .habits import HabitsModel
from .halo import HaloModel
from .model import ModelBase
from .params import Command, CommandQueue
from .reactance import ReactanceModel
from .world import World, WorldConfig

MODEL_KINDS: dict[str, type[ModelBase]] = {
    "habits": HabitsModel,
    "reactance": ReactanceModel,
    "halo": HaloModel,
}

_WORLD_FIELDS = {
    "world.width": int,
    "world.height": int,
    "world.encounter_radius": float,
    "world.step_length": float,
    "world.max_turn_deg": float,
    "world.population_size": int,
    "world.seed": int,
}


def split_overrides(model_cls: type[ModelBase], overrides: dict[str, Any] | None):
    """Partition override keys into world fields, model config fields and
    initial runtime parameters; unknown keys raise InvalidConfig."""
    world_kw: dict[str, Any] = {}
    config_kw: dict[str, Any] = {}
    initial_params: dict[str, Any] = {}
    config_paths = model_cls.config_paths()
    for key, value in (overrides or {}).items():
        if key in _WORLD_FIELDS:
            ftype = _WORLD_FIELDS[key]
            try:
                if ftype is int and (isinstance(value, bool) or float(value) != int(value)):
                    raise ValueError
                world_kw[key.split(".", 1)[1]] = ftype(value)
            except (TypeError, ValueError):
                raise InvalidConfig(key, f"expected {ftype.__name__}, got {value!r}")
        elif key in config_paths:
            config_kw[key] = value
        else:
            # runtime parameter path; raises UnknownParameter for anything
            # else and ValueOutOfRange for bad values
            spec = model_cls.PARAMS.lookup(key)
            if spec.kind == "action":
                raise InvalidConfig(key, "actions cannot be initial parameters; schedule them as commands")
            initial_params[key] = model_cls.PARAMS.validate(key, value)
    return world_kw, config_kw, initial_params


class Engine:
    def __init__(self, model_kind: str, overrides: dict[str, Any] | None = None,
                 seed: int | None = None):
        model_cls = MODEL_KINDS.get(model_kind)
        if model_cls is None:
            raise InvalidConfig("model", f"unknown model kind {model_kind!r}")
        world_kw, config_kw, initial_params = split_overrides(model_cls, overrides)
        if seed is not None:
            world_kw["seed"] = int(seed)

        self.world_config = WorldConfig().replace(**world_kw)
        self.model: ModelBase = model_cls(model_cls.build_config(config_kw))
        # initial parameter values land before setup so tick-0 state (initial
        # choices, satisfaction, halos) already reflects them
        for path, value in initial_params.items():
            self.model.apply_command(path, value)
        self.world = World(
            self.world_config,
            self.world_config.population_size + self.model.extra_agents,
        )
        self.model.setup(self.world)
        self.queue = CommandQueue()

    @property
    def tick(self) -> int:
        return self.world.tick

    @property
    def kind(self) -> str:
        return self.model.kind

    def submit(self, path: str, value: Any = None, tick: int | None = None) -> Command:
        """Queue a command; it applies at the start of the given tick (default:
        the next one).  Path and value are validated immediately."""
        self.model.PARAMS.validate(path, value)
        if tick is None:
            tick = self.tick + 1
        return self.queue.push(tick, path, value)

    def step(self) -> dict[str, Any]:
        """Advance one tick and return its metrics frame."""
        for cmd in self.queue.due(self.tick + 1):
            self.model.apply_command(cmd.path, cmd.value)
        self.world.step_movement()
        pairs = self.world.encounters() if self.model.uses_encounters else None
        self.model.advance(self.world, pairs)
        return self.metrics_frame()

    def metrics_frame(self) -> dict[str, Any]:
        frame = {"tick": self.tick}
        frame.update(_pyify(self.model.metrics()))
        return frame

    def frame(self) -> dict[str, Any]:
        """Full frame for live clients: metrics plus agent display state."""
        return {
            "tick": self.tick,
            "metrics": _pyify(self.model.metrics()),
            "agents": self.model.snapshot(self.world),
        }

    def snapshot(self) -> list[dict]:
        return self.model.snapshot(self.world)

    def capabilities(self) -> dict[str, Any]:
        return {
            "model": self.model.kind,
            "params": self.model.PARAMS.describe(),
            "metrics": list(self.model.METRICS),
            "population_size": self.world_config.population_size,
            "world": {
                "width": self.world_config.width,
                "height": self.world_config.height,
            },
        }


def _pyify(metrics: dict[str, Any]) -> dict[str, Any]:
    """Metrics frames carry plain Python scalars so exports are format-stable."""
    out = {}
    for k, v in metrics.items():
        if isinstance(v, np.floating):
            v = float(v)
        elif isinstance(v, np.integer):
            v = int(v)
        elif isinstance(v, np.bool_):
            v = bool(v)
        out[k] = v
    return out
