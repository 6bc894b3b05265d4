"""Command-line entry point.

Exit codes: 0 success, 1 validation error (bad flags, unknown scenario or
parameter, out-of-range value), 2 runtime error (I/O and unexpected
failures).  Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import configfile, scenario
from .errors import InvalidConfig, InvalidScript, IoFailure, SimError, UnknownParameter, ValueOutOfRange


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; bad invocations are validation errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="biasim", description="cognitive-bias mobility simulators")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[], help="run a scenario headless and export metrics")
    run.add_argument("scenario", help="built-in name or path to a .yaml script")
    run.add_argument("--seed", type=int, default=None, help="override the script's base seed")
    run.add_argument("--replications", type=int, default=None, help="override replication count")
    run.add_argument("--out", default="runs", help="output directory (default: ./runs)")
    run.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
    run.add_argument("--config", default=None, help="flat key=value config file merged as overrides")
    run.add_argument("--set", action="append", default=[], metavar="PATH=VALUE",
                     help="override a parameter path (repeatable)")

    sub.add_parser("list", help="list built-in scenarios")

    val = sub.add_parser("validate", help="validate a scenario script")
    val.add_argument("script", help="path to a .yaml script (or built-in name)")

    srv = sub.add_parser("serve", help="start the live session service")
    srv.add_argument("--port", type=int, default=8642)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--log-dir", default=None, help="directory for per-session command logs")
    srv.add_argument("--ui-dir", default=None, help="static assets to serve at / (default: bundled lookup)")
    return p


def _parse_sets(pairs: list[str]) -> dict:
    out = {}
    for raw in pairs:
        if "=" not in raw:
            raise InvalidConfig(raw, "expected PATH=VALUE")
        key, value = raw.split("=", 1)
        out[key.strip()] = configfile.parse_value(value)
    return out


def _cmd_run(args) -> int:
    script = scenario.load_script(args.scenario)
    overrides = {}
    if args.config:
        overrides.update(configfile.load(args.config))
    overrides.update(_parse_sets(args.set))
    if overrides:
        script = script.apply_flat_overrides(overrides)
    script = script.with_overrides(
        replications=args.replications,
        base_seed=args.seed,
    )
    result = scenario.run_scenario(script, out_dir=args.out, fmt=args.fmt)
    for f in result.files:
        print(f)
    return 0


def _cmd_list() -> int:
    for name in scenario.builtin_names():
        s = scenario.load_builtin(name)
        print(f"{name:24s} [{s.model}] {s.description}")
    return 0


def _cmd_validate(args) -> int:
    script = scenario.load_script(args.script)
    print(f"{script.name}: ok ({script.model}, {script.replications} replications, "
          f"max {script.stop.max_ticks} ticks)")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(log_dir=args.log_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"biasim: error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            return _cmd_list()
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "serve":
            return _cmd_serve(args)
        return 1
    except (InvalidScript, InvalidConfig, UnknownParameter, ValueOutOfRange) as exc:
        print(f"biasim: error: {exc}", file=sys.stderr)
        return 1
    except IoFailure as exc:
        print(f"biasim: i/o error: {exc}", file=sys.stderr)
        return 2
    except SimError as exc:
        print(f"biasim: runtime error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"biasim: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
