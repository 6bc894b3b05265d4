"""Opinion diffusion with confirmation bias and a reactance trigger.

Citizens hold an opinion in [0, 1] about one fact; a messenger broadcasts an
official message on the same scale.  Meetings blend opinions through an
asymmetric average where one's own opinion dominates.  Susceptible citizens
compare any received message with their own opinion: close enough is
persuasive, too far triggers reactance and pushes them the other way.

Three target classes follow from the current message and trigger distance:

* convinced — already within the convinced tolerance of the message;
* positive target — not convinced but still persuadable;
* negative target — susceptible citizens the message can only repel.

The run is pointless once the positive target is empty, which is the built-in
stop condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import InvalidConfig
from .model import ModelBase
from .params import ParamRegistry, ParamSpec
from .world import World


@dataclass(frozen=True)
class ReactanceConfig:
    initial_mean: float = 0.5
    init_variance: float = 0.25     # variance of the initial Gaussian (std = sqrt)
    self_weight: float = 0.8        # own-opinion weight in the asymmetric average
    reactance_delta: float = 0.25   # trigger distance; 1.0 disables the bias
    contagion: bool = False         # citizens also influence each other
    confirmation_bias: bool = False
    agree_tolerance: float = 0.2    # confirmation: max distance that counts as agreement
    convinced_tolerance: float = 0.05
    extremization_step: float = 0.02
    susceptible_fraction: float = 0.5
    peer_reactance: bool = False    # apply the reactance rule to peer opinions too
    message: float = 0.5
    broadcasting: bool = True

    def __post_init__(self):
        if not 0.0 <= self.initial_mean <= 1.0:
            raise InvalidConfig("reactance.initial_mean", "must be in [0, 1]")
        if self.init_variance < 0.0:
            raise InvalidConfig("reactance.init_variance", "must be >= 0")
        if not 0.5 < self.self_weight <= 1.0:
            raise InvalidConfig("reactance.self_weight", "must be in (0.5, 1]")
        if not 0.0 <= self.reactance_delta <= 1.0:
            raise InvalidConfig("reactance.reactance_delta", "must be in [0, 1]")
        if not 0.0 <= self.message <= 1.0:
            raise InvalidConfig("reactance.message", "must be in [0, 1]")
        if not 0.0 <= self.susceptible_fraction <= 1.0:
            raise InvalidConfig("reactance.susceptible_fraction", "must be in [0, 1]")


# ---------------------------------------------------------------------------
# opinion update rules
# ---------------------------------------------------------------------------

def clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def blend(own: float, other: float, w: float) -> float:
    """Asymmetric average: own opinion keeps weight w > 0.5."""
    return clamp01(w * own + (1.0 - w) * other)


def messenger_influence(opinion: float, susceptible: bool, message: float,
                        delta: float, w: float) -> float:
    """Exposure to the broadcast message.

    Attraction (blend) when the agent is not susceptible or the message lies
    within the trigger distance; beyond it, reactance repels the opinion away
    from the message with the same (1 - w) gain, proportionally to the
    distance.  The dichotomy is exact at the threshold: d <= delta attracts,
    d > delta repels.
    """
    d = abs(opinion - message)
    if not susceptible or d <= delta:
        return blend(opinion, message, w)
    direction = 1.0 if opinion > message else -1.0
    return clamp01(opinion + (1.0 - w) * direction * d)


def _extremize(x: float, step: float) -> float:
    if x > 0.5:
        return clamp01(x + step)
    if x < 0.5:
        return clamp01(x - step)
    return x


def peer_interact(a: float, b: float, config: ReactanceConfig,
                  a_susceptible: bool = False, b_susceptible: bool = False) -> tuple[float, float]:
    """Mutual influence between two citizens; both updates read the
    pre-meeting values.

    Without confirmation bias both simply blend toward each other.  With it,
    only opinions within the agree tolerance interact, and after blending the
    pair drifts one extra extremization step away from the middle, which is
    what polarises the population.  With ``peer_reactance`` each side first
    applies the reactance rule to the other's opinion as if it were a
    broadcast message (the alternative reading of the trigger).
    """
    w = config.self_weight
    if config.peer_reactance:
        return (
            messenger_influence(a, a_susceptible, b, config.reactance_delta, w),
            messenger_influence(b, b_susceptible, a, config.reactance_delta, w),
        )
    if config.confirmation_bias:
        if abs(a - b) > config.agree_tolerance:
            return a, b
        na, nb = blend(a, b, w), blend(b, a, w)
        return _extremize(na, config.extremization_step), _extremize(nb, config.extremization_step)
    return blend(a, b, w), blend(b, a, w)


def classify_targets(opinions: np.ndarray, susceptible: np.ndarray, message: float,
                     delta: float, epsilon: float) -> tuple[int, int, int]:
    """(convinced, positive, negative) counts under the current message."""
    d = np.abs(np.asarray(opinions) - message)
    susceptible = np.asarray(susceptible, dtype=bool)
    convinced = d <= epsilon
    negative = ~convinced & susceptible & (d > delta)
    positive = ~convinced & ~negative
    return int(convinced.sum()), int(positive.sum()), int(negative.sum())


def stop_condition(counts: tuple[int, int, int]) -> bool:
    """True once the positive target is empty."""
    return counts[1] == 0


# ---------------------------------------------------------------------------
# engine model
# ---------------------------------------------------------------------------

class ReactanceModel(ModelBase):
    kind = "reactance"
    Config = ReactanceConfig
    uses_encounters = True
    extra_agents = 1  # the messenger moves like a citizen, id = population_size
    PARAMS = ParamRegistry([
        ParamSpec("message", "number", 0.0, 1.0, "Official message"),
        ParamSpec("broadcasting", "toggle", label="Broadcast"),
        ParamSpec("reactance_delta", "number", 0.0, 1.0, "Reactance trigger distance"),
        ParamSpec("contagion", "toggle", label="Opinion contagion"),
        ParamSpec("confirmation_bias", "toggle", label="Confirmation bias"),
    ])
    METRICS = (
        "mean_opinion", "min_opinion", "max_opinion",
        "mean_opinion_rational", "min_opinion_rational", "max_opinion_rational",
        "mean_opinion_susceptible", "min_opinion_susceptible", "max_opinion_susceptible",
        "message", "broadcasting",
        "convinced_count", "positive_count", "negative_count",
        "convinced_pct", "positive_pct", "negative_pct",
        "mean_opinion_persuadable", "persuadable_message_gap",
    )

    def __init__(self, config: ReactanceConfig):
        super().__init__(config)
        self.message = config.message
        self.broadcasting = config.broadcasting
        self.delta = config.reactance_delta
        self.contagion = config.contagion
        self.confirmation = config.confirmation_bias

    def setup(self, world: World) -> None:
        cfg = self.cfg
        n = world.config.population_size
        self.n = n
        self.messenger_id = n
        std = math.sqrt(cfg.init_variance)
        opinions = np.empty(n)
        susceptible = np.empty(n, dtype=bool)
        for i in range(n):
            g = world.init_stream(i)
            opinions[i] = clamp01(cfg.initial_mean + std * g.standard_normal())
            susceptible[i] = g.random() < cfg.susceptible_fraction
        self.opinions = opinions
        self.susceptible = susceptible

    def _runtime_config(self) -> ReactanceConfig:
        # peer_interact reads the live toggles, not the construction-time ones
        return ReactanceConfig(
            initial_mean=self.cfg.initial_mean,
            init_variance=self.cfg.init_variance,
            self_weight=self.cfg.self_weight,
            reactance_delta=self.delta,
            contagion=self.contagion,
            confirmation_bias=self.confirmation,
            agree_tolerance=self.cfg.agree_tolerance,
            convinced_tolerance=self.cfg.convinced_tolerance,
            extremization_step=self.cfg.extremization_step,
            susceptible_fraction=self.cfg.susceptible_fraction,
            peer_reactance=self.cfg.peer_reactance,
            message=self.message,
            broadcasting=self.broadcasting,
        )

    def advance(self, world: World, pairs: np.ndarray) -> None:
        """Process this tick's meetings in (low id, high id) order.

        Influence is applied sequentially across pairs; inside a pair both
        updates read the pre-meeting values.  The messenger only acts while
        broadcasting, and nobody influences the messenger back.
        """
        if pairs is None or len(pairs) == 0:
            return
        w = self.cfg.self_weight
        live = self._runtime_config()
        mid = self.messenger_id
        ops = self.opinions
        sus = self.susceptible
        for i, j in pairs:
            i = int(i)
            j = int(j)
            if j == mid or i == mid:
                if not self.broadcasting:
                    continue
                c = i if j == mid else j
                ops[c] = messenger_influence(ops[c], bool(sus[c]), self.message, self.delta, w)
            elif self.contagion:
                ops[i], ops[j] = peer_interact(
                    ops[i], ops[j], live, bool(sus[i]), bool(sus[j])
                )

    def _apply(self, path: str, value: Any) -> None:
        if path == "message":
            self.message = value
        elif path == "broadcasting":
            self.broadcasting = value
        elif path == "reactance_delta":
            self.delta = value
        elif path == "contagion":
            self.contagion = value
        elif path == "confirmation_bias":
            self.confirmation = value

    def target_counts(self) -> tuple[int, int, int]:
        return classify_targets(
            self.opinions, self.susceptible, self.message, self.delta,
            self.cfg.convinced_tolerance,
        )

    def metrics(self) -> dict[str, Any]:
        ops = self.opinions
        sus = self.susceptible
        convinced_n, positive_n, negative_n = self.target_counts()
        d = np.abs(ops - self.message)
        convinced = d <= self.cfg.convinced_tolerance
        negative = ~convinced & sus & (d > self.delta)
        persuadable = ~negative
        persuadable_mean = _mean(ops[persuadable])
        gap = abs(persuadable_mean - self.message) if persuadable_mean is not None else None
        n = self.n
        return {
            "mean_opinion": _mean(ops),
            "min_opinion": _min(ops),
            "max_opinion": _max(ops),
            "mean_opinion_rational": _mean(ops[~sus]),
            "min_opinion_rational": _min(ops[~sus]),
            "max_opinion_rational": _max(ops[~sus]),
            "mean_opinion_susceptible": _mean(ops[sus]),
            "min_opinion_susceptible": _min(ops[sus]),
            "max_opinion_susceptible": _max(ops[sus]),
            "message": self.message,
            "broadcasting": int(self.broadcasting),
            "convinced_count": convinced_n,
            "positive_count": positive_n,
            "negative_count": negative_n,
            "convinced_pct": 100.0 * convinced_n / n,
            "positive_pct": 100.0 * positive_n / n,
            "negative_pct": 100.0 * negative_n / n,
            "mean_opinion_persuadable": persuadable_mean,
            "persuadable_message_gap": gap,
        }

    def snapshot(self, world: World) -> list[dict]:
        pos = world.positions
        agents = [
            {
                "id": i,
                "x": round(float(pos[i, 0]), 3),
                "y": round(float(pos[i, 1]), 3),
                "opinion": round(float(self.opinions[i]), 4),
                "susceptible": bool(self.susceptible[i]),
            }
            for i in range(self.n)
        ]
        mid = self.messenger_id
        agents.append({
            "id": mid,
            "kind": "messenger",
            "x": round(float(pos[mid, 0]), 3),
            "y": round(float(pos[mid, 1]), 3),
            "message": round(float(self.message), 4),
            "broadcasting": bool(self.broadcasting),
        })
        return agents


def _mean(v: np.ndarray):
    return float(v.mean()) if v.size else None


def _min(v: np.ndarray):
    return float(v.min()) if v.size else None


def _max(v: np.ndarray):
    return float(v.max()) if v.size else None
