"""Command-line front end.

    acs-squeeze report --two-j 2 --theta1 1.55444 --theta2 1.57172 --phi 0.0163226 --phi-r 3.12513
    acs-squeeze optimize --two-j 20 --metric 'xi_planar(yz)' --seed 7
    acs-squeeze sweep --max-two-j 20 --metric 'xi_sorensen(x)' --output sweep.csv
    acs-squeeze ramsey --two-j 20 --kind acs --theta 0 --output scan.csv
    acs-squeeze fit --input sweep.csv --degrees 0,2
    acs-squeeze reproduce-tables --max-two-j 20 --seed 7 --output tables.csv
    acs-squeeze figure --kind fig3 --output-dir figs

Any option can also come from ``--config FILE`` (one ``key=value`` per line,
``#`` starts a comment); flags on the command line win.  Validation problems
exit with status 2 and a one-line message on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .fitters import fit_inverse_j
from .metrics import DEFAULT_DEPTH_TABLE, PLANES, depth_check, qfi, squeezing_report
from .optimizer import minimize_metric, parse_metric, sweep_J
from .ramsey import phase_scan
from .reproduce import (
    FIG3_CURVES,
    FIGURE_CURVES,
    SWEEP_TWO_J,
    fig3_curves,
    fig3_phase_grid,
    fig3_states,
    minima_curves,
    reproduce_tables,
)
from .spin import SpinState, spin_label
from .states import NullSuperpositionError, SuperpositionParams, acs, mes, superposition

UNDEFINED = "undefined"
# options that never change results; kept out of output headers
_NOT_RECORDED = {"output", "output_dir", "format", "config", "workers", "command", "func"}


class UsageError(Exception):
    """Bad input from the user; reported on one line with exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(value) -> str:
    """12 significant digits; None/NaN/Inf become 'undefined'."""
    if value is None:
        return UNDEFINED
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if not math.isfinite(value):
        return UNDEFINED
    return f"{value:.12g}"


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else UNDEFINED
    if isinstance(obj, np.integer):
        return int(obj)
    if obj is None:
        return UNDEFINED
    return obj


def dump_json(data) -> str:
    return json.dumps(_json_safe(data), indent=2, allow_nan=False) + "\n"


def csv_text(header, rows, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def _check_writable(path: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    if not os.path.isdir(directory):
        raise UsageError(f"cannot write {path}: directory {directory} does not exist")
    if not os.access(directory, os.W_OK):
        raise UsageError(f"cannot write {path}: directory {directory} is not writable")
    if os.path.isdir(path):
        raise UsageError(f"cannot write {path}: it is a directory")


def write_outputs(files: dict):
    """Write {path: text} atomically; on failure nothing new is left behind."""
    staged = []
    try:
        for path, text in files.items():
            directory = os.path.dirname(os.path.abspath(path))
            fd, tmp = tempfile.mkstemp(prefix=".acs-squeeze-", dir=directory)
            staged.append((tmp, path))
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
        for tmp, path in staged:
            os.replace(tmp, path)
    except OSError as exc:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.remove(tmp)
        raise UsageError(f"cannot write output: {exc}") from exc


def emit(args, text: str):
    if args.output:
        write_outputs({args.output: text})
    else:
        sys.stdout.write(text)


def recorded_config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_RECORDED and v is not None}


def header_comment(args) -> str:
    parts = [f"{k}={v}" for k, v in recorded_config(args).items()]
    return f"acs-squeeze {args.command} " + " ".join(parts)


# ---------------------------------------------------------------------------
# state construction shared by report and ramsey


def _two_j(args) -> int:
    if args.two_j is None:
        raise UsageError("missing required key: two_j")
    if args.two_j < 1:
        raise UsageError(f"invalid J: two_j must be a positive integer, got {args.two_j}")
    return args.two_j


def _load_state_file(path: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read state file {path}: {exc}") from exc
    try:
        if "state" in data:
            params = data.get("params")
            return SpinState.from_dict(data["state"]), params
        if "re" in data:
            return SpinState.from_dict(data), None
        params = SuperpositionParams.from_dict(data)
        return superposition(int(data["two_j"]) / 2, params), params.to_dict(int(data["two_j"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"state file {path} is not a report, state or parameter file: {exc}") from exc


def build_state(args):
    """State described by the arguments, plus the parameter dict that produced it."""
    if args.from_file:
        return _load_state_file(args.from_file)
    two_j = _two_j(args)
    J = two_j / 2
    try:
        if args.kind == "mes":
            return mes(J), {"two_j": two_j, "kind": "mes"}
        if args.kind == "acs":
            missing = [k for k in ("theta",) if getattr(args, k) is None]
            if missing:
                raise UsageError(f"missing required keys for acs: {', '.join(missing)}")
            phi = args.phi or 0.0
            return acs(J, args.theta, phi), {"two_j": two_j, "kind": "acs", "theta": args.theta, "phi": phi}
        keys = ("theta1", "theta2", "phi", "phi_r")
        missing = [k for k in keys if getattr(args, k) is None]
        if missing:
            raise UsageError(f"missing required keys: {', '.join(missing)}")
        params = SuperpositionParams(args.theta1, args.theta2, args.phi, args.phi_r)
        return superposition(J, params), {**params.to_dict(two_j), "kind": "superposition"}
    except NullSuperpositionError as exc:
        raise UsageError(str(exc)) from exc
    except ValueError as exc:
        raise UsageError(f"invalid state parameters: {exc}") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_report(args):
    state, params = build_state(args)
    report = squeezing_report(state)
    depth = {}
    for plane in PLANES:
        value = report.xi_planar[plane]
        depth[plane] = UNDEFINED if value is None else str(depth_check(value, state.J, DEFAULT_DEPTH_TABLE))
    out = {
        "config": recorded_config(args),
        "params": params,
        "state": state.to_dict(),
        "report": report.to_dict(),
        "qfi": {k: qfi(state, k) for k in "xyz"},
        "depth": depth,
    }
    emit(args, dump_json(out))


def _metric(args):
    try:
        return parse_metric(args.metric)
    except ValueError as exc:
        raise UsageError(f"unknown metric: {exc}") from exc


def _budget(args) -> dict:
    opts = {}
    if args.restarts is not None:
        opts["restarts"] = args.restarts
    if args.max_evals is not None:
        opts["max_evals"] = args.max_evals
    if opts.get("restarts", 1) < 1 or opts.get("max_evals", 5) < 5:
        raise UsageError("zero budget: restarts must be >= 1 and max_evals >= 5")
    return opts


def cmd_optimize(args):
    metric = _metric(args)
    result = minimize_metric(_two_j(args) / 2, metric, seed=args.seed, **_budget(args))
    emit(args, dump_json({"config": recorded_config(args), "result": result.to_dict()}))


def _two_j_list(args):
    if args.two_j_list:
        try:
            values = [int(v) for v in args.two_j_list.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"invalid J list {args.two_j_list!r}") from exc
    else:
        values = list(range(1, args.max_two_j + 1))
    if any(v < 1 for v in values):
        raise UsageError("invalid J: every two_j must be a positive integer")
    return values


SWEEP_COLUMNS = ["two_j", "metric", "best_value", "theta1", "theta2", "phi", "phi_r", "evaluations", "seed"]


def _sweep_row(result):
    p = result.best_params
    return [result.two_j, result.metric, result.best_value, p.theta1, p.theta2, p.phi, p.phi_r,
            result.evaluations, result.seed]


def cmd_sweep(args):
    metric = _metric(args)
    sweep = sweep_J([t / 2 for t in _two_j_list(args)], metric, seed=args.seed, workers=args.workers,
                    **_budget(args))
    if args.format == "json":
        emit(args, dump_json({"config": recorded_config(args), "results": [r.to_dict() for _, r in sweep]}))
    else:
        emit(args, csv_text(SWEEP_COLUMNS, [_sweep_row(r) for _, r in sweep], header_comment(args)))


SCAN_COLUMNS = ["phi", "delta_phi", "scaled_delta_phi", "cfi_bound", "flag"]


def cmd_ramsey(args):
    state, params = build_state(args)
    if args.points < 1:
        raise UsageError("points must be at least 1")
    grid = np.linspace(args.phi_min, args.phi_max, args.points)
    scan = phase_scan(state, grid, with_fisher=True)
    if args.format == "json":
        emit(args, dump_json({
            "config": recorded_config(args),
            "params": params,
            "qfi_bound": scan.qfi_bound,
            "rows": [dict(zip(SCAN_COLUMNS, row)) for row in scan.rows()],
        }))
    else:
        emit(args, csv_text(SCAN_COLUMNS, scan.rows(), header_comment(args)))


def _read_points(args):
    if args.points_list:
        try:
            pairs = [item.split(":") for item in args.points_list.split(",") if item.strip()]
            return [(float(j), float(v)) for j, v in pairs]
        except ValueError as exc:
            raise UsageError(f"invalid points {args.points_list!r}; expected J:value,...") from exc
    if not args.input:
        raise UsageError("missing required key: input (or points_list)")
    try:
        with open(args.input) as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from exc
    reader = csv.DictReader(lines)
    points = []
    for row in reader:
        if "two_j" in row:
            J = int(row["two_j"]) / 2
        elif "J" in row:
            J = float(row["J"])
        else:
            raise UsageError(f"{args.input} needs a two_j or J column")
        value = row.get(args.column)
        if value is None:
            raise UsageError(f"{args.input} has no column {args.column!r}")
        if value == UNDEFINED:
            continue
        points.append((J, float(value)))
    return points


def cmd_fit(args):
    try:
        degrees = [int(d) for d in args.degrees.split(",") if d.strip()]
    except ValueError as exc:
        raise UsageError(f"invalid degrees {args.degrees!r}") from exc
    try:
        fit = fit_inverse_j(_read_points(args), degrees)
    except ValueError as exc:
        raise UsageError(f"fit failed: {exc}") from exc
    if args.format == "csv":
        emit(args, f"# {header_comment(args)}\n" + fit.to_csv())
    else:
        emit(args, dump_json({"config": recorded_config(args), "fit": fit.to_dict()}))


TABLE_COLUMNS = ["table", "two_j", "J", "metric", "best_value", "reference_value", "value_at_reference_params",
                 "within_tolerance", "theta1", "theta2", "phi", "phi_r", "evaluations", "seed"]


def cmd_reproduce_tables(args):
    if args.max_two_j < 1:
        raise UsageError("invalid J: max_two_j must be a positive integer")
    rows = reproduce_tables(args.max_two_j, seed=args.seed, workers=args.workers, **_budget(args))
    out = []
    for r in rows:
        p = r["result"].best_params
        out.append([r["table"], r["two_j"], spin_label(r["two_j"]), r["metric"], r["best_value"],
                    r["reference_value"], r["value_at_reference_params"], r["within_tolerance"],
                    p.theta1, p.theta2, p.phi, p.phi_r, r["result"].evaluations, r["result"].seed])
    emit(args, csv_text(TABLE_COLUMNS, out, header_comment(args)))


def cmd_figure(args):
    outdir = args.output_dir
    if not os.path.isdir(outdir):
        raise UsageError(f"cannot write to {outdir}: not a directory")
    if not os.access(outdir, os.W_OK):
        raise UsageError(f"cannot write to {outdir}: directory is not writable")
    comment = header_comment(args)
    files = {}
    if args.kind in FIGURE_CURVES:
        curves = minima_curves(args.kind, seed=args.seed, workers=args.workers, **_budget(args))
        for name, (sweep, fit) in curves.items():
            rows = []
            for J, r in sweep:
                p = r.best_params
                rows.append([r.two_j, J, 1.0 / J, r.best_value, float(fit.predict(J)),
                             p.theta1, p.theta2, p.phi, p.phi_r])
            files[os.path.join(outdir, f"{args.kind}_{name}.csv")] = csv_text(
                ["two_j", "J", "x", "best_value", "fitted_value", "theta1", "theta2", "phi", "phi_r"],
                rows, comment)
            samples = np.linspace(SWEEP_TWO_J[0] / 2, SWEEP_TWO_J[-1] / 2, 200)
            coeffs = " ".join(f"c{d}={fmt(c)}" for d, c in zip(fit.degrees, fit.coefficients))
            files[os.path.join(outdir, f"{args.kind}_{name}_fit.csv")] = csv_text(
                ["J", "x", "fitted_value"],
                [[J, 1.0 / J, float(fit.predict(J))] for J in samples],
                f"{comment} | fit {coeffs} rms={fmt(fit.residual_rms)}")
    elif args.kind == "fig3":
        states, _ = fig3_states(seed=args.seed, **_budget(args))
        phases = fig3_phase_grid(args.points)
        curves = fig3_curves(states, phases)
        rows = [[ph] + [curves[name][i] for name in FIG3_CURVES] for i, ph in enumerate(phases)]
        files[os.path.join(outdir, "fig3.csv")] = csv_text(["phi", *FIG3_CURVES], rows, comment)
        files[os.path.join(outdir, "fig3_states.json")] = dump_json(
            {"config": recorded_config(args), "states": {k: s.to_dict() for k, s in states.items()}})
    else:
        raise UsageError(f"unknown figure kind {args.kind!r}; expected fig1, fig2 or fig3")
    write_outputs(files)
    for path in files:
        print(path)


# ---------------------------------------------------------------------------
# parser and config handling


def _add_state_options(p):
    p.add_argument("--two-j", type=int, help="2J, a positive integer")
    p.add_argument("--kind", choices=["superposition", "acs", "mes"], default="superposition")
    p.add_argument("--theta1", type=float)
    p.add_argument("--theta2", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--phi-r", type=float)
    p.add_argument("--theta", type=float, help="polar angle for --kind acs")
    p.add_argument("--from-file", help="JSON report, state or parameter file")


def _add_budget(p, seed_default: int):
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--restarts", type=int)
    p.add_argument("--max-evals", type=int)
    p.add_argument("--workers", type=int, help="thread cap (default: ACS_SQUEEZE_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="acs-squeeze", description="Spin and planar squeezing in superpositions of "
                     "spin coherent states.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def command(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--config", help="key=value file")
        p.add_argument("--output", help="output file (default stdout)")
        return p

    p = command("report", cmd_report, "squeezing report for one state (JSON)")
    _add_state_options(p)

    p = command("optimize", cmd_optimize, "minimize one metric at fixed J (JSON)")
    p.add_argument("--two-j", type=int)
    p.add_argument("--metric", required=True)
    _add_budget(p, 0)

    p = command("sweep", cmd_sweep, "optimize one metric for a list of J")
    p.add_argument("--metric", required=True)
    p.add_argument("--two-j-list", help="comma-separated 2J values")
    p.add_argument("--max-two-j", type=int, default=20, help="sweep 2J = 1..N (default 20)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_budget(p, 0)

    p = command("ramsey", cmd_ramsey, "phase-uncertainty scan for one state")
    _add_state_options(p)
    p.add_argument("--phi-min", type=float, default=0.0)
    p.add_argument("--phi-max", type=float, default=1.5)
    p.add_argument("--points", type=int, default=301)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = command("fit", cmd_fit, "fit minima against 1/J")
    p.add_argument("--input", help="CSV with two_j (or J) and a value column")
    p.add_argument("--column", default="best_value")
    p.add_argument("--points-list", help="inline data J:value,J:value,...")
    p.add_argument("--degrees", required=True, help="comma-separated powers of 1/J")
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = command("reproduce-tables", cmd_reproduce_tables, "optimize every reference table row (CSV)")
    p.add_argument("--max-two-j", type=int, default=20)
    _add_budget(p, 7)

    p = command("figure", cmd_figure, "write figure data CSVs")
    p.add_argument("--kind", required=True, help="fig1, fig2 or fig3")
    p.add_argument("--output-dir", default=".")
    p.add_argument("--points", type=int, default=1500, help="phase points for fig3")
    _add_budget(p, 7)
    return parser


def read_config(path: str) -> list[tuple[str, str]]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    pairs = []
    for number, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{number}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        pairs.append((key.replace("_", "-"), value))
    return pairs


def _config_tokens(parser, argv):
    """Expand ``--config FILE`` into flag tokens placed before the command-line flags."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config needs a file name")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    command = next((a for a in rest if not a.startswith("-")), None)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    if command not in subparsers.choices:
        raise UsageError(f"unknown command {command!r}")
    known = {opt for action in subparsers.choices[command]._actions for opt in action.option_strings}
    tokens = []
    for key, value in read_config(path):
        flag = f"--{key}"
        if flag not in known or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for {command}")
        tokens += [flag, value]
    pos = rest.index(command) + 1
    return rest[:pos] + tokens + rest[pos:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_config_tokens(parser, argv))
        if args.command is None:
            raise UsageError("missing command; see --help")
        output = getattr(args, "output", None)
        if output:
            _check_writable(output)
        args.func(args)
    except UsageError as exc:
        print(f"acs-squeeze: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
