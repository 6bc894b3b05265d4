"""Scripted scenarios: timed/conditional commands, stop rules, seeded
replications, and machine-readable exports.

A script is a YAML document (see the built-ins under ``biasim/scenarios/``)::

    schema: 1
    name: habits-baseline
    model: habits
    description: one line on what it reproduces
    world:  {population_size: 500}          # world.* fields, unprefixed
    config: {habits.habits_enabled: false}  # model construction fields
    params: {urban_planning: 10}            # runtime paths applied before tick 1
    commands:
      - {at: 150, set: urban_planning, value: 42}
      - {ramp: urban_planning, from: 10, to: 85, start: 150, end: 250}
      - {when: {metric: persuadable_message_gap, op: "<", value: 0.1},
         set: message, value: 0.4}
      - {at: 300, action: reset_habits}
    stop: {max_ticks: 350, positive_target_empty: true}
    replications: 5
    base_seed: 42

Replication k runs with seed ``base_seed + k``.  Conditional commands are
evaluated against each tick's metrics, fire at most once, apply on the next
tick, and fire strictly in listed order (a later condition is not tested
until every earlier one has fired).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .engine import Engine, MODEL_KINDS, split_overrides
from .world import WorldConfig
from .errors import InvalidScript, IoFailure, SimError

SCHEMA_VERSION = 1

_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
}


@dataclass(frozen=True)
class Condition:
    metric: str
    op: str
    value: float

    def holds(self, frame: dict[str, Any]) -> bool:
        v = frame.get(self.metric)
        if v is None:
            return False
        return _OPS[self.op](v, self.value)


@dataclass(frozen=True)
class ScriptCommand:
    path: str
    value: Any = None
    at: int | None = None
    when: Condition | None = None
    is_action: bool = False


@dataclass(frozen=True)
class StopRule:
    max_ticks: int
    when: Condition | None = None


@dataclass(frozen=True)
class ScenarioScript:
    name: str
    model: str
    description: str = ""
    world: dict[str, Any] = field(default_factory=dict)
    config: dict[str, Any] = field(default_factory=dict)
    params: dict[str, Any] = field(default_factory=dict)
    commands: tuple[ScriptCommand, ...] = ()
    stop: StopRule = StopRule(max_ticks=100)
    replications: int = 1
    base_seed: int = 42

    # -- loading -----------------------------------------------------------

    @classmethod
    def from_mapping(cls, doc: dict[str, Any]) -> "ScenarioScript":
        if not isinstance(doc, dict):
            raise InvalidScript("script document must be a mapping")
        schema = doc.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise InvalidScript(f"unsupported schema version {schema!r}")
        known = {"schema", "name", "model", "description", "world", "config",
                 "params", "commands", "stop", "replications", "base_seed"}
        for key in doc:
            if key not in known:
                raise InvalidScript(f"unknown script field {key!r}")
        name = doc.get("name")
        model = doc.get("model")
        if not name or not isinstance(name, str):
            raise InvalidScript("missing scenario name")
        if model not in MODEL_KINDS:
            raise InvalidScript(f"unknown model {model!r}")

        commands: list[ScriptCommand] = []
        for idx, c in enumerate(doc.get("commands") or []):
            commands.extend(_parse_command(c, idx))

        stop_doc = doc.get("stop") or {}
        if "max_ticks" not in stop_doc:
            raise InvalidScript("stop.max_ticks is required")
        max_ticks = stop_doc["max_ticks"]
        if not isinstance(max_ticks, int) or max_ticks < 0:
            raise InvalidScript("stop.max_ticks must be a nonnegative integer")
        when = None
        if stop_doc.get("positive_target_empty"):
            when = Condition("positive_count", "==", 0)
        if "when" in stop_doc:
            when = _parse_condition(stop_doc["when"], "stop.when")
        replications = doc.get("replications", 1)
        if not isinstance(replications, int) or replications < 1:
            raise InvalidScript("replications must be a positive integer")

        script = cls(
            name=name,
            model=model,
            description=doc.get("description", "") or "",
            world=dict(doc.get("world") or {}),
            config=dict(doc.get("config") or {}),
            params=dict(doc.get("params") or {}),
            commands=tuple(commands),
            stop=StopRule(max_ticks=max_ticks, when=when),
            replications=replications,
            base_seed=int(doc.get("base_seed", 42)),
        )
        script.validate()
        return script

    @classmethod
    def from_file(cls, path: str | Path) -> "ScenarioScript":
        try:
            doc = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            raise InvalidScript(f"not valid YAML: {exc}") from exc
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        return cls.from_mapping(doc)

    def overrides(self) -> dict[str, Any]:
        out = {f"world.{k}": v for k, v in self.world.items()}
        out.update(self.config)
        out.update(self.params)
        return out

    def validate(self) -> None:
        """Check every path, value and condition against the model's surface."""
        model_cls = MODEL_KINDS[self.model]
        try:
            world_kw, config_kw, _ = split_overrides(model_cls, self.overrides())
            WorldConfig().replace(**world_kw)
            model_cls.build_config(config_kw)
        except SimError as exc:
            raise InvalidScript(f"bad override in {self.name!r}: {exc}") from exc
        metric_names = set(model_cls.METRICS)
        for cmd in self.commands:
            try:
                model_cls.PARAMS.validate(cmd.path, cmd.value)
            except SimError as exc:
                raise InvalidScript(f"bad command in {self.name!r}: {exc}") from exc
            if cmd.when is not None and cmd.when.metric not in metric_names:
                raise InvalidScript(
                    f"condition references unknown metric {cmd.when.metric!r}"
                )
            if cmd.at is not None and cmd.at < 1:
                raise InvalidScript("command ticks start at 1")
        if self.stop.when is not None and self.stop.when.metric not in metric_names:
            raise InvalidScript(
                f"stop condition references unknown metric {self.stop.when.metric!r}"
            )

    def with_overrides(self, *, params: dict[str, Any] | None = None,
                       world: dict[str, Any] | None = None,
                       config: dict[str, Any] | None = None,
                       commands: tuple[ScriptCommand, ...] | None = None,
                       replications: int | None = None,
                       base_seed: int | None = None,
                       name: str | None = None) -> "ScenarioScript":
        script = replace(
            self,
            name=name if name is not None else self.name,
            world={**self.world, **(world or {})},
            config={**self.config, **(config or {})},
            params={**self.params, **(params or {})},
            commands=self.commands if commands is None else commands,
            replications=self.replications if replications is None else replications,
            base_seed=self.base_seed if base_seed is None else base_seed,
        )
        script.validate()
        return script

    def apply_flat_overrides(self, sets: dict[str, Any]) -> "ScenarioScript":
        """Apply CLI-style dotted overrides (world.*, <model>.*, runtime paths)."""
        world = {}
        config = {}
        params = {}
        for key, value in sets.items():
            if key.startswith("world."):
                world[key.split(".", 1)[1]] = value
            elif key.startswith(f"{self.model}."):
                config[key] = value
            else:
                params[key] = value
        return self.with_overrides(params=params, world=world, config=config)


def _parse_condition(doc: Any, where: str) -> Condition:
    if not isinstance(doc, dict) or set(doc) != {"metric", "op", "value"}:
        raise InvalidScript(f"{where}: expected {{metric, op, value}}")
    if doc["op"] not in _OPS:
        raise InvalidScript(f"{where}: unknown comparison {doc['op']!r}")
    if not isinstance(doc["value"], (int, float)) or isinstance(doc["value"], bool):
        raise InvalidScript(f"{where}: value must be a number")
    return Condition(str(doc["metric"]), doc["op"], float(doc["value"]))


def _parse_command(doc: Any, idx: int) -> list[ScriptCommand]:
    where = f"commands[{idx}]"
    if not isinstance(doc, dict):
        raise InvalidScript(f"{where}: expected a mapping")
    if "ramp" in doc:
        need = {"ramp", "from", "to", "start", "end"}
        if set(doc) != need:
            raise InvalidScript(f"{where}: ramp needs exactly {sorted(need)}")
        start, end = doc["start"], doc["end"]
        if not (isinstance(start, int) and isinstance(end, int) and 1 <= start < end):
            raise InvalidScript(f"{where}: ramp needs integer ticks 1 <= start < end")
        lo, hi = float(doc["from"]), float(doc["to"])
        span = end - start
        return [
            ScriptCommand(path=str(doc["ramp"]),
                          value=lo + (hi - lo) * (t - start) / span, at=t)
            for t in range(start, end + 1)
        ]
    is_action = "action" in doc
    path = doc.get("action") if is_action else doc.get("set")
    if not path:
        raise InvalidScript(f"{where}: needs 'set', 'action' or 'ramp'")
    when = _parse_condition(doc["when"], where) if "when" in doc else None
    at = doc.get("at")
    if (at is None) == (when is None):
        raise InvalidScript(f"{where}: needs exactly one of 'at' or 'when'")
    if at is not None and not isinstance(at, int):
        raise InvalidScript(f"{where}: 'at' must be an integer tick")
    extra = set(doc) - {"set", "action", "value", "at", "when"}
    if extra:
        raise InvalidScript(f"{where}: unknown keys {sorted(extra)}")
    return [ScriptCommand(path=str(path), value=doc.get("value"), at=at,
                          when=when, is_action=is_action)]


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

@dataclass
class ReplicationResult:
    seed: int
    frames: list[dict[str, Any]]
    stopped_by: str  # "max_ticks" | "condition"


@dataclass
class RunResult:
    script: ScenarioScript
    replications: list[ReplicationResult]
    summary: dict[str, Any]
    files: list[Path] = field(default_factory=list)

    @property
    def metric_names(self) -> list[str]:
        return ["tick"] + list(MODEL_KINDS[self.script.model].METRICS)


def run_replication(script: ScenarioScript, seed: int) -> ReplicationResult:
    engine = Engine(script.model, script.overrides(), seed=seed)
    timed = [c for c in script.commands if c.at is not None]
    conditional = [c for c in script.commands if c.when is not None]
    for c in timed:
        engine.submit(c.path, c.value, tick=c.at)

    frames: list[dict[str, Any]] = []
    fired = 0
    stopped_by = "max_ticks"
    for _ in range(script.stop.max_ticks):
        frame = engine.step()
        frames.append(frame)
        # conditionals fire strictly in listed order, at most once each and at
        # most one per tick, so each is judged on a frame that already
        # reflects the previous one
        if fired < len(conditional) and conditional[fired].when.holds(frame):
            cmd = conditional[fired]
            engine.submit(cmd.path, cmd.value, tick=engine.tick + 1)
            fired += 1
        if script.stop.when is not None and script.stop.when.holds(frame):
            stopped_by = "condition"
            break
    return ReplicationResult(seed=seed, frames=frames, stopped_by=stopped_by)


def run_scenario(script: ScenarioScript, out_dir: str | Path | None = None,
                 fmt: str = "csv") -> RunResult:
    """Run all replications, aggregate the summary, optionally write artifacts."""
    reps = [
        run_replication(script, script.base_seed + k)
        for k in range(script.replications)
    ]
    metric_names = ["tick"] + list(MODEL_KINDS[script.model].METRICS)
    summary = _summarise(script, reps, metric_names)
    result = RunResult(script=script, replications=reps, summary=summary)
    if out_dir is not None:
        result.files = export(result, out_dir, fmt)
    return result


def _summarise(script: ScenarioScript, reps: list[ReplicationResult],
               metric_names: list[str]) -> dict[str, Any]:
    horizon = max((len(r.frames) for r in reps), default=0)
    per_tick: dict[str, dict[str, list]] = {}
    value_metrics = [m for m in metric_names if m != "tick"]
    for m in value_metrics:
        means, mins, maxs, counts = [], [], [], []
        for t in range(horizon):
            vals = [
                r.frames[t][m] for r in reps
                if t < len(r.frames) and r.frames[t][m] is not None
            ]
            counts.append(len(vals))
            means.append(sum(vals) / len(vals) if vals else None)
            mins.append(min(vals) if vals else None)
            maxs.append(max(vals) if vals else None)
        per_tick[m] = {"mean": means, "min": mins, "max": maxs, "count": counts}
    final: dict[str, dict[str, Any]] = {}
    for m in value_metrics:
        vals = [r.frames[-1][m] for r in reps if r.frames and r.frames[-1][m] is not None]
        final[m] = {
            "mean": sum(vals) / len(vals) if vals else None,
            "min": min(vals) if vals else None,
            "max": max(vals) if vals else None,
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario": script.name,
        "model": script.model,
        "base_seed": script.base_seed,
        "replications": script.replications,
        "metric_names": metric_names,
        "stopped_at": [len(r.frames) for r in reps],
        "stopped_by": [r.stopped_by for r in reps],
        "per_tick": per_tick,
        "final": final,
    }


# ---------------------------------------------------------------------------
# export / import
# ---------------------------------------------------------------------------

def _fmt_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def frames_to_csv(script_name: str, seed: int, metric_names: list[str],
                  frames: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    buf.write(f"# biasim frames schema={SCHEMA_VERSION} scenario={script_name} seed={seed}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(metric_names)
    for frame in frames:
        writer.writerow([_fmt_cell(frame[m]) for m in metric_names])
    return buf.getvalue()


def frames_to_json(script_name: str, seed: int, metric_names: list[str],
                   frames: list[dict[str, Any]]) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "scenario": script_name,
        "seed": seed,
        "metric_names": metric_names,
        "frames": [{m: frame[m] for m in metric_names} for frame in frames],
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def load_frames(path: str | Path) -> list[dict[str, Any]]:
    """Read an exported frame stream (either format) back into dicts."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        doc = json.loads(text)
        return doc["frames"]
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    frames = []
    for row in reader:
        frame: dict[str, Any] = {}
        for name, cell in zip(header, row):
            if cell == "":
                frame[name] = None
            elif name in ("tick",) or _looks_int(cell):
                frame[name] = int(cell)
            else:
                frame[name] = float(cell)
        frames.append(frame)
    return frames


def _looks_int(cell: str) -> bool:
    try:
        int(cell)
        return True
    except ValueError:
        return False


def export(result: RunResult, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
    if fmt not in ("csv", "json"):
        raise InvalidScript(f"unknown export format {fmt!r}")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        files = []
        names = result.metric_names
        for rep in result.replications:
            fname = f"{result.script.name}_seed{rep.seed}.{fmt}"
            text = (frames_to_csv if fmt == "csv" else frames_to_json)(
                result.script.name, rep.seed, names, rep.frames
            )
            p = out / fname
            p.write_text(text, encoding="utf-8", newline="")
            files.append(p)
        sp = out / f"{result.script.name}_summary.json"
        sp.write_text(json.dumps(result.summary, indent=1, allow_nan=False) + "\n",
                      encoding="utf-8", newline="")
        files.append(sp)
        return files
    except OSError as exc:
        raise IoFailure(f"cannot write artifacts under {out}: {exc}") from exc


# ---------------------------------------------------------------------------
# built-ins
# ---------------------------------------------------------------------------

def builtin_names() -> list[str]:
    root = resources.files("biasim").joinpath("scenarios")
    return sorted(p.name[: -len(".yaml")] for p in root.iterdir() if p.name.endswith(".yaml"))


def load_builtin(name: str) -> ScenarioScript:
    path = resources.files("biasim").joinpath("scenarios", f"{name}.yaml")
    if not path.is_file():
        raise InvalidScript(
            f"unknown scenario {name!r}; built-ins: {', '.join(builtin_names())}"
        )
    return ScenarioScript.from_mapping(yaml.safe_load(path.read_text(encoding="utf-8")))


def load_script(name_or_path: str | Path) -> ScenarioScript:
    """Resolve a built-in name or a path to a script file."""
    p = Path(name_or_path)
    if p.suffix in (".yaml", ".yml") or p.exists():
        return ScenarioScript.from_file(p)
    return load_builtin(str(name_or_path))
