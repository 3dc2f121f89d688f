"""Command line entry point: ``gmanifolds check <file>`` and ``gmanifolds fixtures list|dump <name>``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from importlib import resources

from .runner import run
from .scenario import ScenarioError, parse_scenario


def builtin_names() -> list[str]:
    root = resources.files("gmanifolds") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def builtin_text(name: str) -> str:
    if name not in builtin_names():
        raise KeyError(name)
    return (resources.files("gmanifolds") / "scenarios" / f"{name}.yaml").read_text()


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gmanifolds", description="Exact and numerical checks on Lie algebra actions.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", help="run the checks of a scenario file")
    c.add_argument("scenario", help="scenario file, or builtin:<name> for a bundled scenario")
    c.add_argument("--report", choices=["text", "structured"], default="text")
    c.add_argument("--ode-steps", type=int, default=None, help="RK4 steps per unit time")
    c.add_argument("--tol", type=float, default=None, help="numeric tolerance for checks without an explicit one")
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--timings", action="store_true", help="include wall times (makes reports non-reproducible)")
    f = sub.add_parser("fixtures", help="bundled scenarios")
    f.add_argument("action", choices=["list", "dump"])
    f.add_argument("name", nargs="?")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "fixtures":
        if args.action == "list":
            print("\n".join(builtin_names()))
            return 0
        if not args.name:
            print("fixtures dump needs a name", file=sys.stderr)
            return 2
        try:
            sys.stdout.write(builtin_text(args.name))
        except KeyError:
            print(f"unknown fixture {args.name!r}; known: {', '.join(builtin_names())}", file=sys.stderr)
            return 2
        return 0

    try:
        if args.scenario.startswith("builtin:"):
            name = args.scenario.split(":", 1)[1]
            text = builtin_text(name)
        else:
            name = args.scenario
            with open(args.scenario, encoding="utf-8") as fh:
                text = fh.read()
    except (KeyError, OSError) as exc:
        print(f"cannot read scenario {args.scenario!r}: {exc}", file=sys.stderr)
        return 2
    try:
        scen = parse_scenario(text, name)
    except ScenarioError as exc:
        print(f"{args.scenario}: {exc}", file=sys.stderr)
        return 2
    if args.ode_steps is not None:
        if args.ode_steps < 1:
            print("--ode-steps must be positive", file=sys.stderr)
            return 2
        scen.settings = replace(scen.settings, steps_per_unit_time=args.ode_steps)
    if args.seed is not None:
        scen.seed = args.seed
    report = run(scen, jobs=max(1, args.jobs), tol=args.tol if args.tol is not None else scen.tol, timings=args.timings)
    sys.stdout.write(report.structured() if args.report == "structured" else report.text())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
