"""Command-line entry point: ``avoider run | calibrate | render``.

Exit status: 0 success (a TIMEOUT episode still counts), 1 invalid input,
2 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .engine import run, trace_from_csv, trace_to_csv
from .render import RenderSpec, render_trace
from .scenario import ScenarioError, load_scenario, with_seed
from .sensors import DEFAULT_TABLES, fit_line, interp

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


class _IOFailure(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror or exc}") from None


def _render_format(path: str) -> str:
    return "ascii" if Path(path).suffix.lower() in (".txt", ".ascii") else "svg"


def cmd_run(args) -> int:
    scenario = with_seed(load_scenario(_read(args.scenario)), args.seed)
    trace, result = run(scenario)
    _write(args.out, trace_to_csv(trace))
    if args.render:
        _write(args.render, render_trace(trace, scenario, RenderSpec(_render_format(args.render))))
    print(result.summary())
    return EXIT_OK


def sample_points(table, step_cm):
    lo, hi = table.span
    if step_cm is None:
        return table.distances
    if step_cm <= 0:
        raise ValueError("--step-cm must be positive")
    points = []
    i = 0
    while lo + i * step_cm < hi - 1e-9:
        points.append(round(lo + i * step_cm, 9))
        i += 1
    points.append(hi)
    return points


def calibration_csv(name: str, step_cm=None, fit: bool = False) -> str:
    table = DEFAULT_TABLES[name]
    lines = ["distance_cm,volts"]
    lines.extend(f"{d:g},{interp(table, d):.6g}" for d in sample_points(table, step_cm))
    if fit:
        slope, intercept, residual = fit_line(table)
        lines.append(f"# fit slope_v_per_cm={slope:.9g} intercept_v={intercept:.9g} max_residual_v={residual:.9g}")
    return "\n".join(lines) + "\n"


def cmd_calibrate(args) -> int:
    try:
        text = calibration_csv(args.table, args.step_cm, args.fit)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _write(args.out, text)
    if args.fit:
        print(text.rstrip().splitlines()[-1].lstrip("# "))
    return EXIT_OK


def cmd_render(args) -> int:
    scenario = load_scenario(_read(args.scenario))
    try:
        trace = trace_from_csv(_read(args.trace))
    except (ValueError, IndexError) as exc:
        print(f"error: {args.trace}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if not trace:
        print(f"error: {args.trace}: trace has no records", file=sys.stderr)
        return EXIT_INVALID
    _write(args.out, render_trace(trace, scenario, RenderSpec(args.format, args.scale)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avoider", description="Fire-extinguishing avoider robot simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario episode and write its trace CSV")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--out", required=True, help="trace CSV path")
    p.add_argument("--render", default=None, help="optional drawing (.svg, or .txt for ascii)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("calibrate", help="sample a built-in calibration curve")
    p.add_argument("--table", required=True, choices=sorted(DEFAULT_TABLES))
    p.add_argument("--fit", action="store_true", help="append the least-squares line")
    p.add_argument("--step-cm", type=float, default=None, help="sampling step (default: table knots)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("render", help="draw a recorded trace")
    p.add_argument("--scenario", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--format", choices=("ascii", "svg"), default="svg")
    p.add_argument("--scale", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is not None and args.seed < 0:
        print("error: --seed must be an unsigned integer", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
