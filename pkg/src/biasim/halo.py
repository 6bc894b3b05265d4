"""Multicriteria mode choice with a halo bias that hides weak criteria.

The town rates four mobility modes (car, bike, bus, walk) on six criteria;
each citizen weighs the criteria with personal priorities and picks the mode
with the best weighted average.  Susceptible citizens re-evaluating their own
mode ignore every criterion whose score has fallen too far below its priority
(the halo), which restores a positive view of the current mode without
switching.  Other modes are always evaluated cleanly.

Evaluation order each tick: refresh the halo set against the current mode,
score all modes (current one through the halo filter), switch to the argmax,
refresh halos against the new mode, then record satisfaction as the (possibly
filtered) mark of the mode actually kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

import numpy as np

from .errors import AllCriteriaSuppressed, InfeasibleProfile, InvalidConfig, ValueOutOfRange
from .model import ModelBase
from .params import ParamRegistry, ParamSpec
from .world import World

MODES = ("car", "bike", "bus", "walk")          # also the argmax tie-break order
CRITERIA = ("time", "cost", "comfort", "safety", "ecology", "praticity")

# Default town scores, qualitatively shaped: bike/walk very ecological, car
# not at all; car/bus comfortable; walk slowest and cheapest.  Fully
# configurable through score.<mode>.<criterion>.
DEFAULT_SCORES = {
    "car":  {"time": 90, "cost": 40, "comfort": 90, "safety": 80, "ecology": 10, "praticity": 80},
    "bike": {"time": 70, "cost": 90, "comfort": 40, "safety": 50, "ecology": 95, "praticity": 60},
    "bus":  {"time": 60, "cost": 70, "comfort": 70, "safety": 85, "ecology": 60, "praticity": 50},
    "walk": {"time": 20, "cost": 100, "comfort": 40, "safety": 90, "ecology": 100, "praticity": 40},
}

# Priority templates per assigned mode; sampled priorities are template plus
# uniform noise, re-drawn until the assigned mode is the rational best choice.
MODE_TEMPLATES = {
    "car":  {"time": 75, "cost": 60, "comfort": 65, "safety": 70, "ecology": 10, "praticity": 55},
    "bike": {"time": 55, "cost": 80, "comfort": 20, "safety": 40, "ecology": 80, "praticity": 50},
    "bus":  {"time": 55, "cost": 55, "comfort": 75, "safety": 85, "ecology": 55, "praticity": 25},
    "walk": {"time": 15, "cost": 85, "comfort": 30, "safety": 75, "ecology": 85, "praticity": 45},
}


class ScoreMatrix:
    """Town-wide mode x criterion scores in [0, 100]."""

    def __init__(self, values: np.ndarray):
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (len(MODES), len(CRITERIA)):
            raise InvalidConfig("scores", f"expected shape {(len(MODES), len(CRITERIA))}")
        if ((self.values < 0) | (self.values > 100)).any():
            raise ValueOutOfRange("scores", "entries", 0, 100)

    @classmethod
    def default(cls) -> "ScoreMatrix":
        vals = [[DEFAULT_SCORES[m][c] for c in CRITERIA] for m in MODES]
        return cls(np.array(vals, dtype=float))

    def copy(self) -> "ScoreMatrix":
        return ScoreMatrix(self.values.copy())

    def get(self, mode: str, criterion: str) -> float:
        return float(self.values[MODES.index(mode), CRITERIA.index(criterion)])

    def set(self, mode: str, criterion: str, value: float) -> None:
        if not 0.0 <= value <= 100.0:
            raise ValueOutOfRange(f"score.{mode}.{criterion}", value, 0, 100)
        self.values[MODES.index(mode), CRITERIA.index(criterion)] = value

    def row(self, mode: str) -> np.ndarray:
        return self.values[MODES.index(mode)]


@dataclass(frozen=True)
class HaloConfig:
    halo_threshold: float = 15.0
    susceptible_fraction: float = 0.5
    share_car: float = 0.50
    share_bike: float = 0.20
    share_bus: float = 0.20
    share_walk: float = 0.10
    priority_noise: float = 10.0
    latch_halos: bool = False       # alternative: halos persist until the mode changes
    max_init_tries: int = 1000

    def __post_init__(self):
        split = (self.share_car, self.share_bike, self.share_bus, self.share_walk)
        if any(s < 0 for s in split) or abs(sum(split) - 1.0) > 1e-9:
            raise InvalidConfig("halo.share_*", "modal split must be nonnegative and sum to 1")
        if not 0.0 <= self.susceptible_fraction <= 1.0:
            raise InvalidConfig("halo.susceptible_fraction", "must be in [0, 1]")

    @property
    def modal_split(self) -> tuple[float, ...]:
        return (self.share_car, self.share_bike, self.share_bus, self.share_walk)


# ---------------------------------------------------------------------------
# per-agent operations (scalar path; the model vectorises the same math)
# ---------------------------------------------------------------------------

@dataclass
class HaloAgent:
    priorities: dict
    current_mode: str
    susceptible: bool
    active_halos: set = field(default_factory=set)
    satisfaction: float = 0.0


def global_mark(mode: str, scores: ScoreMatrix, priorities: Mapping[str, float],
                suppressed: Iterable[str] = ()) -> float:
    """Priority-weighted average score of one mode over non-suppressed criteria."""
    suppressed = set(suppressed)
    num = 0.0
    den = 0.0
    row = scores.row(mode)
    for k, c in enumerate(CRITERIA):
        if c in suppressed:
            continue
        p = float(priorities[c])
        num += p * row[k]
        den += p
    if den <= 0.0:
        raise AllCriteriaSuppressed(
            f"no positive-priority criterion left for mode {mode!r} with {sorted(suppressed)} suppressed"
        )
    return num / den


def update_halos(agent: HaloAgent, scores: ScoreMatrix, config: HaloConfig) -> HaloAgent:
    """Recompute the halo set against the agent's current mode: a criterion is
    suppressed while its score sits at least halo_threshold below the agent's
    priority for it.  Non-susceptible agents never hold halos."""
    if not agent.susceptible:
        agent.active_halos = set()
        return agent
    row = scores.row(agent.current_mode)
    triggered = {
        c for k, c in enumerate(CRITERIA)
        if float(agent.priorities[c]) - row[k] >= config.halo_threshold
    }
    if config.latch_halos:
        agent.active_halos |= triggered
    else:
        agent.active_halos = triggered
    return agent


def _current_mode_mark(agent: HaloAgent, scores: ScoreMatrix) -> float:
    # a halo set that suppresses every weighted criterion falls back to the
    # clean evaluation for the tick
    try:
        return global_mark(agent.current_mode, scores, agent.priorities, agent.active_halos)
    except AllCriteriaSuppressed:
        return global_mark(agent.current_mode, scores, agent.priorities)


def choose_mode(agent: HaloAgent, scores: ScoreMatrix, config: HaloConfig) -> str:
    """Evaluate all modes (current one through the halo filter, others
    cleanly), switch to the best mark with the fixed tie-break order, refresh
    halos for the kept mode and set satisfaction to its filtered mark."""
    best_mode = None
    best_mark = -1.0
    for m in MODES:
        if m == agent.current_mode:
            mark = _current_mode_mark(agent, scores)
        else:
            mark = global_mark(m, scores, agent.priorities)
        if mark > best_mark:
            best_mark = mark
            best_mode = m
    if best_mode != agent.current_mode:
        agent.current_mode = best_mode
        update_halos(agent, scores, config)
    agent.satisfaction = _current_mode_mark(agent, scores)
    return agent.current_mode


def shift_priorities(population: Iterable[HaloAgent], criterion: str, delta: float) -> None:
    """Population-wide priority shift (a communication campaign), clamped to [0, 100]."""
    for agent in population:
        v = float(agent.priorities[criterion]) + delta
        agent.priorities[criterion] = min(100.0, max(0.0, v))


# ---------------------------------------------------------------------------
# engine model
# ---------------------------------------------------------------------------

def _score_param_specs() -> list[ParamSpec]:
    specs = [ParamSpec("halo_threshold", "number", 0.0, 100.0, "Halo trigger threshold")]
    for m in MODES:
        for c in CRITERIA:
            specs.append(ParamSpec(f"score.{m}.{c}", "number", 0.0, 100.0, f"{m} score on {c}"))
    for c in CRITERIA:
        specs.append(ParamSpec(
            f"priority_shift.{c}", "action", label=f"Shift {c} priority", takes_value=True,
        ))
    return specs


class HaloModel(ModelBase):
    kind = "halo"
    Config = HaloConfig
    uses_encounters = False
    PARAMS = ParamRegistry(_score_param_specs())
    METRICS = tuple(
        [f"share_{m}" for m in MODES]
        + [f"count_rational_{m}" for m in MODES]
        + [f"count_biased_{m}" for m in MODES]
        + [f"share_rational_{m}" for m in MODES]
        + [f"share_biased_{m}" for m in MODES]
        + ["mean_satisfaction_rational", "mean_satisfaction_biased"]
        + [f"mean_satisfaction_rational_{m}" for m in MODES]
        + [f"mean_satisfaction_biased_{m}" for m in MODES]
        + [f"mark_users_{m}" for m in MODES]
        + [f"mark_nonusers_{m}" for m in MODES]
        + [f"halo_count_{m}_{c}" for m in MODES for c in CRITERIA]
        + ["halo_threshold"]
    )

    def __init__(self, config: HaloConfig):
        super().__init__(config)
        self.scores = ScoreMatrix.default()
        self.threshold = config.halo_threshold

    def setup(self, world: World) -> None:
        cfg = self.cfg
        n = world.config.population_size
        self.n = n

        counts = _largest_remainder(n, cfg.modal_split)
        mode = np.concatenate([np.full(k, idx, dtype=np.int8) for idx, k in enumerate(counts)])
        self.mode = mode

        f = cfg.susceptible_fraction
        ids = np.arange(n)
        self.susceptible = (np.floor((ids + 1) * f) - np.floor(ids * f)) >= 1

        S = self.scores.values
        templates = np.array([[MODE_TEMPLATES[m][c] for c in CRITERIA] for m in MODES], dtype=float)
        P = np.empty((n, len(CRITERIA)))
        for i in range(n):
            g = world.init_stream(i)
            assigned = int(mode[i])
            base = templates[assigned]
            for _ in range(cfg.max_init_tries):
                pr = np.clip(base + g.uniform(-cfg.priority_noise, cfg.priority_noise, len(CRITERIA)), 0.0, 100.0)
                marks = pr @ S.T / pr.sum()
                if int(np.argmax(marks)) == assigned:
                    P[i] = pr
                    break
            else:
                raise InfeasibleProfile(
                    f"no priority vector makes {MODES[assigned]!r} the rational choice "
                    f"after {cfg.max_init_tries} tries (agent {i})"
                )
        self.priorities = P
        self.halos = np.zeros((n, len(CRITERIA)), dtype=bool)
        self._refresh_halos()
        self.satisfaction = self._suppressed_current_mark()

    # -- vectorised evaluation --------------------------------------------

    def _refresh_halos(self, only_rows: np.ndarray | None = None) -> None:
        rows_scores = self.scores.values[self.mode]          # (n, 6)
        triggered = (self.priorities - rows_scores) >= self.threshold
        triggered &= self.susceptible[:, None]
        if self.cfg.latch_halos and only_rows is None:
            self.halos |= triggered
            self.halos &= self.susceptible[:, None]
        elif self.cfg.latch_halos:
            self.halos[only_rows] = triggered[only_rows]
        else:
            self.halos = triggered

    def _clean_marks(self) -> np.ndarray:
        # an all-zero priority row (possible via extreme downward shifts)
        # evaluates to 0 rather than dividing by zero
        P = self.priorities
        den = P.sum(axis=1, keepdims=True)
        return (P @ self.scores.values.T) / np.where(den > 0, den, 1.0)

    def _suppressed_current_mark(self) -> np.ndarray:
        rows_scores = self.scores.values[self.mode]
        w = self.priorities * ~self.halos
        den = w.sum(axis=1)
        num = (w * rows_scores).sum(axis=1)
        clean_den = self.priorities.sum(axis=1)
        clean = (self.priorities * rows_scores).sum(axis=1) / np.where(clean_den > 0, clean_den, 1.0)
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), clean)

    def advance(self, world: World, pairs) -> None:
        self._refresh_halos()
        evals = self._clean_marks()
        rows = np.arange(self.n)
        evals[rows, self.mode] = self._suppressed_current_mark()
        new_mode = np.argmax(evals, axis=1).astype(np.int8)
        switched = new_mode != self.mode
        self.mode = new_mode
        if self.cfg.latch_halos:
            self._refresh_halos(only_rows=switched)
        else:
            self._refresh_halos()
        self.satisfaction = self._suppressed_current_mark()

    def _apply(self, path: str, value: Any) -> None:
        if path == "halo_threshold":
            self.threshold = value
        elif path.startswith("score."):
            _, m, c = path.split(".")
            self.scores.set(m, c, value)
        elif path.startswith("priority_shift."):
            c = CRITERIA.index(path.split(".")[1])
            self.priorities[:, c] = np.clip(self.priorities[:, c] + value, 0.0, 100.0)

    def metrics(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        sus = self.susceptible
        clean = self._clean_marks()
        n_rational = int((~sus).sum())
        n_biased = int(sus.sum())
        for idx, m in enumerate(MODES):
            users = self.mode == idx
            out[f"share_{m}"] = users.mean()
            out[f"count_rational_{m}"] = int((users & ~sus).sum())
            out[f"count_biased_{m}"] = int((users & sus).sum())
        for idx, m in enumerate(MODES):
            users = self.mode == idx
            out[f"share_rational_{m}"] = (
                out[f"count_rational_{m}"] / n_rational if n_rational else None
            )
            out[f"share_biased_{m}"] = (
                out[f"count_biased_{m}"] / n_biased if n_biased else None
            )
        out["mean_satisfaction_rational"] = _mean(self.satisfaction[~sus])
        out["mean_satisfaction_biased"] = _mean(self.satisfaction[sus])
        for idx, m in enumerate(MODES):
            users = self.mode == idx
            out[f"mean_satisfaction_rational_{m}"] = _mean(self.satisfaction[users & ~sus])
            out[f"mean_satisfaction_biased_{m}"] = _mean(self.satisfaction[users & sus])
        for idx, m in enumerate(MODES):
            users = self.mode == idx
            out[f"mark_users_{m}"] = _mean(self.satisfaction[users])
            out[f"mark_nonusers_{m}"] = _mean(clean[~users, idx])
        for idx, m in enumerate(MODES):
            users = self.mode == idx
            for k, c in enumerate(CRITERIA):
                out[f"halo_count_{m}_{c}"] = int((users & self.halos[:, k]).sum())
        out["halo_threshold"] = self.threshold
        return out

    def snapshot(self, world: World) -> list[dict]:
        pos = world.positions
        return [
            {
                "id": i,
                "x": round(float(pos[i, 0]), 3),
                "y": round(float(pos[i, 1]), 3),
                "mode": MODES[self.mode[i]],
                "satisfaction": round(float(self.satisfaction[i]), 3),
                "susceptible": bool(self.susceptible[i]),
                "halo": bool(self.halos[i].any()),
            }
            for i in range(self.n)
        ]


def _largest_remainder(n: int, split: tuple[float, ...]) -> list[int]:
    raw = [n * s for s in split]
    counts = [int(x) for x in raw]
    short = n - sum(counts)
    order = sorted(range(len(split)), key=lambda k: raw[k] - counts[k], reverse=True)
    for k in order[:short]:
        counts[k] += 1
    return counts


def _mean(v: np.ndarray):
    return float(v.mean()) if v.size else None
