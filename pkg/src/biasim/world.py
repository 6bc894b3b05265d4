"""Toroidal 2D world with random-walk movement and encounter detection.

The world knows nothing about any model: it moves points on a torus and
reports which pairs are close enough to meet this tick.  Models decide what a
meeting means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from . import rng
from .errors import InvalidConfig


@dataclass(frozen=True)
class WorldConfig:
    width: int = 40
    height: int = 40
    encounter_radius: float = 1.0
    step_length: float = 1.0
    max_turn_deg: float = 45.0
    population_size: int = 200
    seed: int = 42

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidConfig("world.width/height", "must be positive")
        if self.encounter_radius < 0:
            raise InvalidConfig("world.encounter_radius", "must be >= 0")
        if self.step_length <= 0:
            raise InvalidConfig("world.step_length", "must be > 0")
        if self.population_size <= 0:
            raise InvalidConfig("world.population_size", "must be > 0")

    def replace(self, **kw) -> "WorldConfig":
        current = {f.name: getattr(self, f.name) for f in fields(self)}
        current.update(kw)
        return WorldConfig(**current)


def torus_delta(a: np.ndarray, b: np.ndarray, span: float) -> np.ndarray:
    """Shortest signed-magnitude separation along one wrapped axis."""
    d = np.abs(a - b)
    return np.minimum(d, span - d)


def torus_distance(p: np.ndarray, q: np.ndarray, width: float, height: float) -> float:
    dx = torus_delta(p[0], q[0], width)
    dy = torus_delta(p[1], q[1], height)
    return float(np.hypot(dx, dy))


class World:
    """Positions and headings for ``n_agents`` points, advanced one tick at a time.

    ``n_agents`` may exceed ``config.population_size`` when a model adds
    non-citizen agents (the reactance messenger); extras get ids after the
    citizens and move by the same rule.
    """

    def __init__(self, config: WorldConfig, n_agents: int | None = None):
        self.config = config
        self.n_agents = config.population_size if n_agents is None else n_agents
        self.tick = 0
        self._max_turn = math.radians(config.max_turn_deg)

        n = self.n_agents
        self.positions = np.empty((n, 2))
        self.headings = np.empty(n)
        for i in range(n):
            g = rng.substream(config.seed, i, rng.INIT)
            self.positions[i, 0] = g.random() * config.width
            self.positions[i, 1] = g.random() * config.height
            self.headings[i] = g.random() * 2.0 * math.pi
        self._move_bank = rng.StreamBank(config.seed, n, rng.MOVE)

    def init_stream(self, agent_id: int) -> np.random.Generator:
        """The construction-time stream for one agent, already advanced past
        the three draws the world took for position and heading."""
        g = rng.substream(self.config.seed, agent_id, rng.INIT)
        g.random(3)
        return g

    def step_movement(self) -> None:
        """Turn every agent by a uniform angle in [-max_turn, +max_turn], advance
        it by step_length, and wrap onto the torus."""
        cfg = self.config
        u = self._move_bank.next_column()
        self.headings = np.mod(self.headings + (2.0 * u - 1.0) * self._max_turn, 2.0 * math.pi)
        self.positions[:, 0] = np.mod(
            self.positions[:, 0] + cfg.step_length * np.cos(self.headings), cfg.width
        )
        self.positions[:, 1] = np.mod(
            self.positions[:, 1] + cfg.step_length * np.sin(self.headings), cfg.height
        )
        self.tick += 1

    def encounters(self) -> np.ndarray:
        """All unordered pairs within encounter_radius, as an (k, 2) int array
        sorted by (low id, high id).  Each pair appears once per tick."""
        cfg = self.config
        x = self.positions[:, 0]
        y = self.positions[:, 1]
        dx = torus_delta(x[:, None], x[None, :], cfg.width)
        dy = torus_delta(y[:, None], y[None, :], cfg.height)
        within = dx * dx + dy * dy <= cfg.encounter_radius ** 2
        within &= np.triu(np.ones_like(within, dtype=bool), k=1)
        return np.argwhere(within)

    def distance(self, i: int, j: int) -> float:
        return torus_distance(
            self.positions[i], self.positions[j], self.config.width, self.config.height
        )
