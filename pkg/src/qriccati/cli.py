"""Command-line scenario runner.

    qriccati run --scenario fundamental-example
    qriccati run --scenario euler2-family --param A=2
    qriccati run --scenario transport-convergence --grids 9,17,33
    qriccati list
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import grid as G
from .errors import ConfigError, ScenarioFailure
from .scenarios import SCENARIOS, ScenarioConfig, run_scenario

log = logging.getLogger("qriccati")

CONFIG_KEYS = {"scenario", "box", "grid", "grids", "tol", "params", "seed", "out", "format"}


def _floats(text, count=None, name="value"):
    try:
        vals = tuple(float(x) for x in str(text).split(","))
    except ValueError as exc:
        raise ConfigError(f"{name}: expected comma-separated numbers, got {text!r}") from exc
    if count is not None and len(vals) != count:
        raise ConfigError(f"{name}: expected {count} numbers, got {len(vals)}")
    return vals


def _ints(text, name):
    vals = _floats(text, name=name)
    if any(v != int(v) or v < 3 for v in vals):
        raise ConfigError(f"{name}: node counts must be integers >= 3")
    return tuple(int(v) for v in vals)


def _grid(text):
    n = _ints(text, "--grid")
    if len(n) == 1:
        return n * 3
    if len(n) != 3:
        raise ConfigError("--grid takes n or n1,n2,n3")
    return n


def build_config(args) -> ScenarioConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    params = dict(data.get("params", {}))
    for item in args.param or []:
        if "=" not in item:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        params[key] = value

    scenario = args.scenario or data.get("scenario")
    if scenario is None:
        raise ConfigError("no scenario given")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")

    box = args.box or data.get("box")
    if box is not None:
        box = _floats(box if isinstance(box, str) else ",".join(map(str, box)), 6, "--box")
    grid = args.grid or data.get("grid")
    if grid is not None:
        grid = _grid(grid if isinstance(grid, str) else ",".join(map(str, grid if isinstance(grid, list) else [grid])))
    grids = args.grids or data.get("grids")
    if grids is not None:
        grids = _ints(grids if isinstance(grids, str) else ",".join(map(str, grids)), "--grids")
    fmt = args.format or data.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"--format must be json or csv, got {fmt!r}")
    out = args.out or data.get("out")
    if fmt == "csv" and scenario not in ("euler1-transport",):
        raise ConfigError("csv output is a grid dump; only euler1-transport produces a grid")
    if fmt == "csv" and out is None:
        raise ConfigError("csv output needs --out")
    tol = args.tol if args.tol is not None else data.get("tol")
    seed = args.seed if args.seed is not None else data.get("seed", 0)
    try:
        tol = None if tol is None else float(tol)
        seed = int(seed)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return ScenarioConfig(scenario, box, grid, grids, tol, params, seed, out, fmt)


def render(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def run(cfg: ScenarioConfig) -> int:
    report, grid = run_scenario(cfg)
    text = render(report)
    if cfg.out is None:
        sys.stdout.write(text)
    elif cfg.format == "csv":
        G.write_csv(grid, cfg.out)
        Path(cfg.out).with_suffix(".json").write_text(text)
    else:
        Path(cfg.out).write_text(text)
    for c in report["checks"]:
        log.info("%s %s: %s (%s)", "PASS" if c["passed"] else "FAIL", c["name"], c["value"], c["bound"])
    if not report["passed"]:
        raise ScenarioFailure(f"scenario {cfg.scenario} failed")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qriccati", description="Construct and verify solutions of D f + f^2 = v.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one scenario")
    r.add_argument("--scenario")
    r.add_argument("--config", help="JSON config file; flags override its values")
    r.add_argument("--box", help="x1min,x1max,x2min,x2max,x3min,x3max")
    r.add_argument("--grid", help="n or n1,n2,n3")
    r.add_argument("--grids", help="comma-separated node counts for convergence studies")
    r.add_argument("--tol", type=float, help="override the scenario's residual tolerances")
    r.add_argument("--param", action="append", help="key=value, repeatable")
    r.add_argument("--seed", type=int)
    r.add_argument("--out")
    r.add_argument("--format", choices=("json", "csv"))
    sub.add_parser("list", help="list scenarios")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s", stream=sys.stderr)
    if args.command == "list":
        for name, (_, anchor) in SCENARIOS.items():
            print(f"{name:24s} {anchor}")
        return 0
    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ScenarioFailure as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
