"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 unstable system
(no stationary state), 4 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .entanglement import analyze_pair
from .errors import InvalidParameterError, OptoentError, UnstableSystemError
from .model import SystemParams, build_model
from .steady_state import check_stability, lyapunov_residual, residual_bound, solve_lyapunov
from .sweep import (FIGURE_BASE, FIGURES, SWEEP_AXES, SweepSpec, figure_preset, linear_grid,
                    log_grid, run_sweep)

EXIT_OK, EXIT_USAGE, EXIT_UNSTABLE, EXIT_IO = 0, 2, 3, 4

REQUIRED_KEYS = ("omega_m", "gamma_m", "kappa1", "kappa2", "kappa3", "g1", "g2", "g3", "temperature")
OPTIONAL_KEYS = ("nbar",)
CSV_COLUMNS = ("index", "axis_value", "stable", "E_N", "eta_minus", "duan_plus", "duan_minus",
               "max_real_part")


class ConfigError(InvalidParameterError):
    def __init__(self, message: str, lineno: Optional[int] = None, source: str = "<config>"):
        self.lineno = lineno
        where = f"{source}:{lineno}: " if lineno is not None else f"{source}: "
        super().__init__(where + message)


def parse_config(text: str, source: str = "<config>") -> SystemParams:
    """Parse ``key = value`` lines into :class:`SystemParams`.

    ``#`` starts a comment, keys are case-sensitive, and every required key
    must appear exactly once.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, source)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in REQUIRED_KEYS and key not in OPTIONAL_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, source)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno, source)
        try:
            number = float(value)
        except ValueError:
            raise ConfigError(f"value of {key!r} is not a number: {value!r}", lineno, source) from None
        if not math.isfinite(number):
            raise ConfigError(f"value of {key!r} must be finite, got {value!r}", lineno, source)
        values[key] = number
    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing key(s): {', '.join(missing)}", None, source)
    nbar = values.pop("nbar", None)
    try:
        return SystemParams(**values, nbar_override=nbar)
    except InvalidParameterError as exc:
        raise ConfigError(str(exc), None, source) from None


def format_config(params: SystemParams) -> str:
    """Inverse of :func:`parse_config`; floats are written with ``repr`` for an exact round trip."""
    lines = ["# rates in units of 2*pi*MHz, temperature in K"]
    for key in REQUIRED_KEYS:
        lines.append(f"{key} = {getattr(params, key)!r}")
    if params.nbar_override is not None:
        lines.append(f"nbar = {params.nbar_override!r}")
    return "\n".join(lines) + "\n"


def load_config(path: str) -> SystemParams:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, str(path)) from None
    return parse_config(text, str(path))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.9g}"


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([
            _fmt(row.index), _fmt(row.axis_value), _fmt(row.stable), _fmt(row.log_negativity),
            _fmt(row.eta_minus), _fmt(row.duan_plus), _fmt(row.duan_minus),
            _fmt(row.max_real_part),
        ])
    return buf.getvalue()


def _emit(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _params(args) -> SystemParams:
    if args.config is None:
        raise ConfigError("--config is required for this command")
    return load_config(args.config)


def _parse_pair(text: str) -> tuple[str, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"pair must look like '1,2', got {text!r}")
    return parts[0], parts[1]


def cmd_check(args) -> int:
    params = _params(args)
    report = check_stability(build_model(params))
    if args.json:
        _emit(json.dumps({"params": params.as_dict(), **report.as_dict()}, indent=2) + "\n", args.output)
    else:
        lines = [
            "stable" if report.stable else "unstable",
            f"max_real_part = {report.max_real_part:.9g}",
        ]
        if report.analytic_threshold is not None:
            lines.append(f"analytic_threshold = {report.analytic_threshold:.9g}")
        if report.margin is not None:
            lines.append(f"margin = {report.margin:.9g}")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if report.stable else EXIT_UNSTABLE


def cmd_solve(args) -> int:
    params = _params(args)
    model = build_model(params)
    v = solve_lyapunov(model)
    report = analyze_pair(v, *args.pair, model=model)
    residual = lyapunov_residual(model, v)
    if args.json:
        payload = {"params": params.as_dict(), "nbar": model.nbar, **report.as_dict(),
                   "lyapunov_residual": residual,
                   "residual_bound": residual_bound(model, v)}
        if args.full_v:
            payload["covariance"] = v.entries.tolist()
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
    else:
        lines = [f"pair = ({report.labels[0]}, {report.labels[1]})"]
        for key in ("log_negativity", "eta_minus", "sigma", "duan_plus", "duan_minus"):
            value = getattr(report, key)
            if value is not None:
                lines.append(f"{key} = {value:.9g}")
        lines.append(f"lyapunov_residual = {residual:.3g}")
        if args.full_v:
            lines.append("covariance =")
            lines.extend("  " + " ".join(f"{x: .9g}" for x in row) for row in v.entries)
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _sweep_values(args) -> tuple[float, ...]:
    chosen = [x for x in (args.values, args.range, args.log) if x is not None]
    if len(chosen) != 1:
        raise ConfigError("give exactly one of --values, --range, --log")
    try:
        if args.values is not None:
            return tuple(float(x) for x in args.values.split(","))
        if args.range is not None:
            start, stop, step = (float(x) for x in args.range.split(":"))
            return linear_grid(start, stop, step)
        start, stop, count = args.log.split(":")
        return log_grid(float(start), float(stop), int(count))
    except ValueError as exc:
        raise ConfigError(f"bad sweep grid: {exc}") from None


def cmd_sweep(args) -> int:
    spec = SweepSpec(_params(args), args.axis, _sweep_values(args),
                     lock_g2_to_g1=args.lock_g2_to_g1, pair=args.pair)
    rows = run_sweep(spec, workers=args.workers)
    if args.json:
        _emit(json.dumps([row.__dict__ for row in rows], indent=2) + "\n", args.output)
    else:
        _emit(rows_to_csv(rows), args.output)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    specs = figure_preset(args.figure)
    outdir = Path(args.output or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    for spec in specs:
        rows = run_sweep(spec, workers=args.workers)
        path = outdir / f"{spec.label}.csv"
        path.write_text(rows_to_csv(rows))
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="key=value parameter file")
    common.add_argument("--output", default=argparse.SUPPRESS,
                        help="output file (directory for 'reproduce')")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    common.add_argument("--dump-config", action="store_true", default=argparse.SUPPRESS,
                        help="print the parsed configuration and exit")

    parser = argparse.ArgumentParser(
        prog="optoent",
        description="Steady-state entanglement of a four-mode optomechanical system.")
    parser.add_argument("--config", default=None)
    parser.add_argument("--output", default=None)
    parser.add_argument("--json", action="store_true", default=False)
    parser.add_argument("--dump-config", action="store_true", default=False)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("check", parents=[common], help="stability of the drift matrix")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", parents=[common], help="stationary covariance and entanglement")
    p.add_argument("--pair", type=_parse_pair, default=("1", "2"), help="mode pair, e.g. 1,2 or m,3")
    p.add_argument("--full-v", action="store_true", help="include the 8x8 covariance matrix")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", parents=[common], help="1-D parameter sweep as CSV")
    p.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p.add_argument("--values", help="comma-separated axis values")
    p.add_argument("--range", help="linear grid start:stop:step (inclusive)")
    p.add_argument("--log", help="log grid start:stop:count")
    p.add_argument("--lock-g2-to-g1", action="store_true")
    p.add_argument("--pair", type=_parse_pair, default=("1", "2"))
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", parents=[common], help="write the CSV data of a figure")
    p.add_argument("figure", help=f"one of {', '.join(FIGURES)}")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.dump_config:
            params = load_config(args.config) if args.config else FIGURE_BASE
            _emit(format_config(params), args.output)
            return EXIT_OK
        if args.command is None:
            parser.error("a command is required (check, solve, sweep, reproduce)")
        return args.func(args)
    except UnstableSystemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OptoentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
