"""Habit-driven mobility choice between bicycle and car.

A single urban-planning scalar in [0, 100] says how strongly the town favours
bicycles (100) over cars (0).  Each tick every citizen makes one trip:

* **rational** choice marks each mode by how favoured it is and uses the mark
  as the probability of picking it;
* **routine** choice replays the frequency of each mode over a sliding window
  of past trips (no habit exists until the window is full).

The probability of deciding routinely equals the habit strength, i.e. the
dominant mode's frequency in the window, so habits self-reinforce after the
window fills.  A full window of a single mode is an absorbing routine: only
the reset action (a "crisis") breaks it.

Satisfaction is always the rational mark of the mode actually used, which is
what makes locked-in drivers unhappy after planning turns against them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import HistoryTooShort, InvalidConfig
from .model import ModelBase
from .params import ParamRegistry, ParamSpec
from .world import World
from . import rng

BIKE = "bike"
CAR = "car"
MODES = (BIKE, CAR)
_BIKE, _CAR = 0, 1

RATIONAL = "rational"
ROUTINE = "routine"


@dataclass(frozen=True)
class HabitsConfig:
    window: int = 20
    habits_enabled: bool = True
    happy_threshold: float = 50.0
    urban_planning: float = 50.0

    def __post_init__(self):
        if self.window < 1:
            raise InvalidConfig("habits.window", "must be >= 1")
        if not 0.0 <= self.urban_planning <= 100.0:
            raise InvalidConfig("habits.urban_planning", "must be in [0, 100]")


# ---------------------------------------------------------------------------
# per-agent operations (also the oracle path for the vectorised model)
# ---------------------------------------------------------------------------

@dataclass
class MobilityAgent:
    """Scalar-path citizen used by the operation-level API and tests."""
    history: list = field(default_factory=list)
    current_mode: str = CAR
    satisfaction: float = 0.0
    last_decision_kind: str = RATIONAL


def rational_mark(mode: str, planning: float) -> float:
    """Mark of a mode under the current planning: bike scores the planning
    value itself, car its complement."""
    return planning if mode == BIKE else 100.0 - planning


def rational_choice(planning: float, u: float) -> str:
    """Pick bike with probability planning/100, given a uniform draw."""
    return BIKE if u < planning / 100.0 else CAR


def routine_choice(history: list, window: int, u: float) -> str:
    """Replay the window: pick bike with its frequency among past trips."""
    if len(history) < window:
        raise HistoryTooShort(f"history has {len(history)} trips, window is {window}")
    p_bike = history.count(BIKE) / window
    return BIKE if u < p_bike else CAR


def habit_strength(history: list, window: int) -> float:
    """Frequency of the dominant mode; zero until the window is full."""
    if len(history) < window:
        return 0.0
    n_bike = history.count(BIKE)
    return max(n_bike, window - n_bike) / window


def decide(agent: MobilityAgent, planning: float, config: HabitsConfig,
           gate_u: float, choice_u: float) -> tuple[str, str]:
    """One trip decision from two uniform draws (gate, then mode pick).

    The gate draw is consumed whether or not habits can fire, so toggling
    habits mid-run never shifts later draws.  The chosen mode is appended to
    the history, evicting the oldest trip once the window is full, and
    satisfaction is re-marked for the chosen mode.
    """
    full = len(agent.history) == config.window
    kind = RATIONAL
    if config.habits_enabled and full and gate_u < habit_strength(agent.history, config.window):
        mode = routine_choice(agent.history, config.window, choice_u)
        kind = ROUTINE
    else:
        mode = rational_choice(planning, choice_u)
    agent.history.append(mode)
    if len(agent.history) > config.window:
        agent.history.pop(0)
    agent.current_mode = mode
    agent.satisfaction = rational_mark(mode, planning)
    agent.last_decision_kind = kind
    return mode, kind


def reset_habits(population: list) -> list:
    """Erase every agent's trip history; decisions revert to rational until
    the windows refill.  Idempotent."""
    for agent in population:
        agent.history.clear()
        agent.last_decision_kind = RATIONAL
    return population


# ---------------------------------------------------------------------------
# vectorised engine model
# ---------------------------------------------------------------------------

class HabitsModel(ModelBase):
    kind = "habits"
    Config = HabitsConfig
    uses_encounters = False
    PARAMS = ParamRegistry([
        ParamSpec("urban_planning", "number", 0.0, 100.0, "Urban planning (0 car .. 100 bike)"),
        ParamSpec("habits_enabled", "toggle", label="Habits"),
        ParamSpec("reset_habits", "action", label="Reset habits"),
    ])
    METRICS = (
        "bike_share", "car_share",
        "mean_satisfaction_bike", "mean_satisfaction_car",
        "happy_count_bike", "unhappy_count_bike",
        "happy_count_car", "unhappy_count_car",
        "mean_habit_strength_bike", "mean_habit_strength_car",
        "rational_count", "routine_count",
        "urban_planning", "habits_enabled",
    )

    def __init__(self, config: HabitsConfig):
        super().__init__(config)
        self.planning = config.urban_planning
        self.enabled = config.habits_enabled

    def setup(self, world: World) -> None:
        n = world.config.population_size
        W = self.cfg.window
        self.n = n
        self.history = np.full((n, W), -1, dtype=np.int8)
        self.hist_len = np.zeros(n, dtype=np.int64)
        self.ptr = np.zeros(n, dtype=np.int64)
        self.bike_count = np.zeros(n, dtype=np.int64)
        self.routine_mask = np.zeros(n, dtype=bool)

        # initial mode is a rational draw from each agent's construction stream
        u0 = np.array([world.init_stream(i).random() for i in range(n)])
        self.mode = np.where(u0 < self.planning / 100.0, _BIKE, _CAR).astype(np.int8)
        self.satisfaction = self._marks(self.mode)

        seed = world.config.seed
        self._gate_bank = rng.StreamBank(seed, n, rng.GATE)
        self._choice_bank = rng.StreamBank(seed, n, rng.CHOICE)

    def _marks(self, modes: np.ndarray) -> np.ndarray:
        return np.where(modes == _BIKE, self.planning, 100.0 - self.planning)

    def advance(self, world: World, pairs) -> None:
        W = self.cfg.window
        gate_u = self._gate_bank.next_column()
        choice_u = self._choice_bank.next_column()

        full = self.hist_len == W
        strength = np.where(full, np.maximum(self.bike_count, W - self.bike_count) / W, 0.0)
        routine = full & (gate_u < strength) if self.enabled else np.zeros(self.n, dtype=bool)

        p_bike = np.where(routine, self.bike_count / W, self.planning / 100.0)
        new_mode = np.where(choice_u < p_bike, _BIKE, _CAR).astype(np.int8)

        rows = np.arange(self.n)
        evicted = self.history[rows, self.ptr]
        self.bike_count -= (full & (evicted == _BIKE)).astype(np.int64)
        self.history[rows, self.ptr] = new_mode
        self.bike_count += (new_mode == _BIKE).astype(np.int64)
        self.ptr = (self.ptr + 1) % W
        self.hist_len = np.minimum(self.hist_len + 1, W)

        self.mode = new_mode
        self.routine_mask = routine
        self.satisfaction = self._marks(new_mode)

    def _apply(self, path: str, value: Any) -> None:
        if path == "urban_planning":
            self.planning = value
        elif path == "habits_enabled":
            self.enabled = value
        elif path == "reset_habits":
            self.history[:] = -1
            self.hist_len[:] = 0
            self.ptr[:] = 0
            self.bike_count[:] = 0
            self.routine_mask[:] = False

    def metrics(self) -> dict[str, Any]:
        bike = self.mode == _BIKE
        car = ~bike
        thr = self.cfg.happy_threshold
        full = self.hist_len == self.cfg.window
        W = self.cfg.window
        bike_freq = np.where(full, self.bike_count / W, 0.0)
        car_freq = np.where(full, (W - self.bike_count) / W, 0.0)
        routine = int(self.routine_mask.sum())
        return {
            "bike_share": bike.mean(),
            "car_share": car.mean(),
            "mean_satisfaction_bike": _mean(self.satisfaction[bike]),
            "mean_satisfaction_car": _mean(self.satisfaction[car]),
            "happy_count_bike": int((bike & (self.satisfaction > thr)).sum()),
            "unhappy_count_bike": int((bike & (self.satisfaction < thr)).sum()),
            "happy_count_car": int((car & (self.satisfaction > thr)).sum()),
            "unhappy_count_car": int((car & (self.satisfaction < thr)).sum()),
            "mean_habit_strength_bike": _mean(bike_freq[bike]),
            "mean_habit_strength_car": _mean(car_freq[car]),
            "rational_count": self.n - routine,
            "routine_count": routine,
            "urban_planning": self.planning,
            "habits_enabled": int(self.enabled),
        }

    def snapshot(self, world: World) -> list[dict]:
        pos = world.positions
        return [
            {
                "id": i,
                "x": round(float(pos[i, 0]), 3),
                "y": round(float(pos[i, 1]), 3),
                "mode": MODES[self.mode[i]],
                "satisfaction": round(float(self.satisfaction[i]), 3),
                "kind": ROUTINE if self.routine_mask[i] else RATIONAL,
                "history_len": int(self.hist_len[i]),
            }
            for i in range(self.n)
        ]


def _mean(values: np.ndarray):
    return float(values.mean()) if values.size else None
