"""Command-line front end.

Subcommands: construct, energy, flow, verify, sweep, cut-paste.  Every run
that writes files also writes a RunManifest JSON next to its primary output
listing the resolved configuration and every output path, so reruns can be
checked for bit-identical results.  Exit codes: 0 ok, 1 usage error, 2
numerical failure, 3 verification failure.

Floats are printed with 17 significant digits everywhere so that parsing a
report back recovers the doubles exactly.  Config precedence is
command-line flags over key=value config file over built-in defaults.
"""

from __future__ import annotations

import argparse
import dataclasses
import inspect
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .curves import ArcCurve, LiftError, UnderResolvedError, read_curve, write_curve
from .energy import NotClosedError, energies
from .experiments import (
    MonotonicityError,
    WindowError,
    below_threshold_graphicality_experiment,
    embeddedness_threshold_experiment,
    graphicality_threshold_experiment,
    li_yau_sweep,
)
from .flow import (
    STOP_CRITERIA,
    EnergyDecayError,
    FlowConfig,
    FlowState,
    ImmersionLossError,
    run,
)
from .numerics import DomainError, NoBracketError, NonConvergenceError
from .shapes import FAMILY_BUILDERS, AssemblyError, cut_and_paste, sample_family
from .verify import SUITE_NAMES, all_passed, format_table, run_suite

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFICATION = 3

_NUMERICAL_ERRORS = (
    DomainError,
    NoBracketError,
    NonConvergenceError,
    NotClosedError,
    AssemblyError,
    LiftError,
    UnderResolvedError,
    ImmersionLossError,
    EnergyDecayError,
    WindowError,
    MonotonicityError,
    ValueError,
    ArithmeticError,
    np.linalg.LinAlgError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; route through UsageError so
    # main() can map usage problems to exit code 1 instead.
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# JSON with fixed float formatting


def _to_json(obj, indent: int = 0) -> str:
    pad = " " * indent
    inner = " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [
            '%s"%s": %s' % (inner, key, _to_json(val, indent + 2))
            for key, val in obj.items()
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        parts = [inner + _to_json(val, indent + 2) for val in seq]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return "%.17g" % x
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError("cannot serialize %r" % type(obj))


# ---------------------------------------------------------------------------
# manifest


@dataclass
class RunManifest:
    command: list[str]
    config: dict
    inputs: list[str]
    outputs: list[str]
    version: str = __version__
    wall_time_s: float = 0.0
    result: dict = field(default_factory=dict)

    def write(self, primary_output: Path) -> Path:
        path = primary_output.with_name(primary_output.stem + ".manifest.json")
        body = {
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "version": self.version,
            "wall_time_s": self.wall_time_s,
        }
        if self.result:
            body["result"] = self.result
        path.write_text(_to_json(body) + "\n")
        return path


# ---------------------------------------------------------------------------
# config file and flag resolution


def _read_config_file(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    values: dict[str, str] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError("%s:%d: expected key=value" % (path, lineno))
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _coerce(key: str, text: str, default):
    if text.lower() in ("none", "null"):
        return None
    target = type(default) if default is not None else float
    try:
        if target is bool:
            if text.lower() in ("true", "1", "yes"):
                return True
            if text.lower() in ("false", "0", "no"):
                return False
            raise ValueError(text)
        if target is int:
            return int(text)
        if target is float:
            return float(text)
        return text
    except ValueError:
        raise UsageError("bad value for %s: %r" % (key, text)) from None


def _resolve(defaults: dict, file_values: dict[str, str], flag_values: dict) -> dict:
    unknown = set(file_values) - set(defaults)
    if unknown:
        raise UsageError("unknown config keys: %s" % ", ".join(sorted(unknown)))
    merged = dict(defaults)
    for key, text in file_values.items():
        merged[key] = _coerce(key, text, defaults[key])
    for key, value in flag_values.items():
        if value is not None:
            merged[key] = value
    return merged


def _flow_defaults() -> dict:
    return {f.name: f.default for f in dataclasses.fields(FlowConfig)}


def _add_flow_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key=value config file")
    sub.add_argument("--truncation-radius", "--R", dest="truncation_radius", type=float)
    sub.add_argument("--n-grid", dest="n_grid", type=int)
    sub.add_argument("--dt", type=float)
    sub.add_argument("--t-max", dest="t_max", type=float)
    sub.add_argument("--redistribute-every", dest="redistribute_every", type=int)
    sub.add_argument("--event-check-every", dest="event_check_every", type=int)
    sub.add_argument("--energy-decay-slack", dest="energy_decay_slack", type=float)
    sub.add_argument("--spatial-tol", dest="spatial_tol", type=float)
    sub.add_argument("--angle-tol", dest="angle_tol", type=float)
    sub.add_argument("--plateau-tol", dest="plateau_tol", type=float)
    sub.add_argument("--plateau-window", dest="plateau_window", type=int)
    sub.add_argument("--immersion-floor-factor", dest="immersion_floor_factor", type=float)


def _flow_config_from_args(args, curve: ArcCurve | None = None) -> tuple[FlowConfig, dict]:
    defaults = _flow_defaults()
    file_values = _read_config_file(args.config)
    flags = {k: getattr(args, k, None) for k in defaults if k != "boundary"}
    # Grid settings default to the input curve's own geometry; the class
    # defaults only apply when there is no curve to read them from.
    if curve is not None:
        explicit = set(file_values) | {k for k, v in flags.items() if v is not None}
        if "n_grid" not in explicit:
            defaults["n_grid"] = curve.n_samples
        if "truncation_radius" not in explicit:
            span = float(curve.params[-1] - curve.params[0])
            defaults["truncation_radius"] = span / 2.0
    resolved = _resolve(defaults, file_values, flags)
    return FlowConfig(**resolved), resolved


def _flow_flags_given(args) -> bool:
    keys = [f.name for f in dataclasses.fields(FlowConfig) if f.name != "boundary"]
    return args.config is not None or any(getattr(args, k, None) is not None for k in keys)


# ---------------------------------------------------------------------------
# output writers


def _write_svg(path: Path, c: ArcCurve) -> Path:
    """Stroke-only polyline, y flipped so the plot reads the usual way up."""
    pts = c.points
    if c.dim != 2:
        raise UsageError("svg output is planar only")
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    margin = 0.05 * float(span.max())
    width = float(span[0]) + 2 * margin
    height = float(span[1]) + 2 * margin
    x0 = float(lo[0]) - margin
    y0 = -float(hi[1]) - margin  # y axis flipped
    coords = " ".join(
        "%.6g,%.6g" % (float(p[0]), -float(p[1])) for p in pts
    )
    stroke = 0.004 * max(width, height)
    body = (
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="%.6g %.6g %.6g %.6g">\n'
        '  <polyline points="%s" fill="none" stroke="black" stroke-width="%.6g"/>\n'
        "</svg>\n" % (x0, y0, width, height, coords, stroke)
    )
    path.write_text(body)
    return path


def _write_flow_log(path: Path, state: FlowState) -> Path:
    times = [t for t, _ in state.energy_history]
    labels = [""] * len(times)
    for ev in state.events:
        if not times:
            break
        idx = int(np.argmin(np.abs(np.asarray(times) - ev.t)))
        labels[idx] = ev.kind if not labels[idx] else labels[idx] + "+" + ev.kind
    lines = ["t,E,B,D,min_tangent_e1,sup_curvature,event"]
    for i, (t, rep) in enumerate(state.energy_history):
        lines.append(
            "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s"
            % (
                t,
                rep.energy,
                rep.bending,
                rep.direction,
                state.min_tangent_e1_history[i][1],
                state.sup_curvature_history[i][1],
                labels[i],
            )
        )
    path.write_text("\n".join(lines) + "\n")
    return path


def _report_dict(rep) -> dict:
    return {
        "length": rep.length,
        "direction": rep.direction,
        "bending": rep.bending,
        "energy": rep.energy,
        "elastic_energy": rep.elastic_energy,
        "quad_error": rep.quad_error,
        "tail_bound": rep.tail_bound,
    }


# ---------------------------------------------------------------------------
# subcommands


def _cmd_construct(args, argv: list[str]) -> int:
    t0 = time.perf_counter()
    family = args.family.replace("-", "_")
    if family not in FAMILY_BUILDERS:
        raise UsageError(
            "unknown family %r (have: %s)"
            % (args.family, ", ".join(sorted(FAMILY_BUILDERS)))
        )
    builder = FAMILY_BUILDERS[family]
    defaults = {
        name: p.default
        for name, p in inspect.signature(builder).parameters.items()
        if p.kind is not inspect.Parameter.VAR_KEYWORD
    }
    flags = {k: getattr(args, k) for k in ("R", "n", "m", "a", "b", "phi", "radius", "length", "y")}
    flags = {k: v for k, v in flags.items() if k in defaults or v is not None}
    unknown = set(k for k, v in flags.items() if v is not None) - set(defaults)
    if unknown:
        raise UsageError(
            "family %s does not take: %s (takes %s)"
            % (family, ", ".join(sorted(unknown)), ", ".join(sorted(defaults)))
        )
    resolved = _resolve(defaults, _read_config_file(args.config), flags)
    curve = sample_family(family, **resolved)

    out = Path(args.out)
    write_curve(out, curve, family=family, family_params=resolved)
    outputs = [str(out), str(out.with_suffix(".json"))]
    if args.svg:
        outputs.append(str(_write_svg(Path(args.svg), curve)))
    manifest = RunManifest(
        command=argv,
        config={"family": family, **resolved},
        inputs=[],
        outputs=outputs,
        wall_time_s=time.perf_counter() - t0,
        result={"n_samples": curve.n_samples, "kind": curve.kind.value},
    )
    manifest.write(out)
    return EXIT_OK


def _cmd_energy(args, argv: list[str]) -> int:
    t0 = time.perf_counter()
    curve = read_curve(args.input)
    rep = energies(curve)
    body = _report_dict(rep)
    if curve.is_closed:
        defect = abs(rep.direction - rep.length)
        body["c0_closed_identity_defect"] = defect
        if defect <= 1e-8:
            body["flag"] = "C0-closed identity holds"
    text = _to_json(body) + "\n"
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        manifest = RunManifest(
            command=argv,
            config={"input": args.input},
            inputs=[args.input],
            outputs=[str(out)],
            wall_time_s=time.perf_counter() - t0,
        )
        manifest.write(out)
    return EXIT_OK


def _parse_stop(text: str) -> tuple[str, ...]:
    if text.lower() == "none":
        return ()
    names = tuple(s.strip() for s in text.split(",") if s.strip())
    unknown = set(names) - set(STOP_CRITERIA)
    if unknown:
        raise UsageError(
            "unknown stop criteria: %s (have: %s, or 'none')"
            % (", ".join(sorted(unknown)), ", ".join(STOP_CRITERIA))
        )
    return names


def _cmd_flow(args, argv: list[str]) -> int:
    t0 = time.perf_counter()
    stop = _parse_stop(args.stop)
    initial = read_curve(args.input)
    config, resolved = _flow_config_from_args(args, curve=initial)
    state = run(initial, config, stop=stop)

    out_curve = Path(args.out_curve)
    write_curve(out_curve, state.curve)
    outputs = [str(out_curve), str(out_curve.with_suffix(".json"))]
    log_path = Path(args.log) if args.log else out_curve.with_name(out_curve.stem + ".log.csv")
    _write_flow_log(log_path, state)
    outputs.append(str(log_path))
    if args.svg:
        outputs.append(str(_write_svg(Path(args.svg), state.curve)))

    rise = 0.0
    if len(state.energy_history) > 1:
        values = np.asarray([rep.energy for _, rep in state.energy_history])
        rise = float(max(0.0, np.diff(values).max()))
    manifest = RunManifest(
        command=argv,
        config={**resolved, "stop": list(stop)},
        inputs=[args.input],
        outputs=outputs,
        wall_time_s=time.perf_counter() - t0,
        result={
            "stop_reason": state.stop_reason,
            "t_final": state.t,
            "steps": state.step_count,
            "events": [
                {"t": ev.t, "kind": ev.kind} for ev in state.events
            ],
            "energy_initial": state.energy_history[0][1].energy,
            "energy_final": state.energy_history[-1][1].energy,
            "max_energy_rise": rise,
        },
    )
    manifest.write(out_curve)
    sys.stdout.write(
        "stop=%s t=%.17g steps=%d events=%d\n"
        % (state.stop_reason, state.t, state.step_count, len(state.events))
    )
    return EXIT_OK


def _cmd_verify(args, argv: list[str]) -> int:
    t0 = time.perf_counter()
    names = tuple(s.strip() for s in args.suite.split(",")) if args.suite else SUITE_NAMES
    unknown = set(names) - set(SUITE_NAMES)
    if unknown:
        raise UsageError(
            "unknown suite(s): %s (have: %s)"
            % (", ".join(sorted(unknown)), ", ".join(SUITE_NAMES))
        )
    results = {}
    for name in names:
        results[name] = run_suite(name)
        sys.stdout.write(format_table(name, results[name]) + "\n\n")
    ok = all_passed(results)
    sys.stdout.write("verify: %s\n" % ("all checks passed" if ok else "FAILURES"))
    if args.out:
        out = Path(args.out)
        body = {
            name: [row.as_dict() for row in rows] for name, rows in results.items()
        }
        out.write_text(_to_json({"passed": ok, "suites": body}) + "\n")
        manifest = RunManifest(
            command=argv,
            config={"suites": list(names)},
            inputs=[],
            outputs=[str(out)],
            wall_time_s=time.perf_counter() - t0,
            result={"passed": ok},
        )
        manifest.write(out)
    return EXIT_OK if ok else EXIT_VERIFICATION


_SWEEP_KINDS = ("li-yau", "graphicality", "embeddedness", "below-threshold")


def _sweep_summary(report: dict) -> str:
    lines = ["sweep %s" % report["kind"]]
    runs = report.get("runs", [])
    if runs:
        keys = sorted({k for row in runs for k in row})
        lines.append("  " + " | ".join(keys))
        for row in runs:
            cells = []
            for k in keys:
                v = row.get(k)
                cells.append("%.6g" % v if isinstance(v, float) else str(v))
            lines.append("  " + " | ".join(cells))
    for key, value in report.items():
        if key in ("kind", "runs", "rows", "witnesses", "config"):
            continue
        lines.append("  %s = %s" % (key, value))
    return "\n".join(lines)


def _cmd_sweep(args, argv: list[str]) -> int:
    t0 = time.perf_counter()
    if args.kind not in _SWEEP_KINDS:
        raise UsageError(
            "unknown sweep kind %r (have: %s)" % (args.kind, ", ".join(_SWEEP_KINDS))
        )
    config = None
    if args.kind != "li-yau" and _flow_flags_given(args):
        config, _ = _flow_config_from_args(args)

    log_hook = None
    log_dir = None
    if args.log_dir and args.kind != "li-yau":
        log_dir = Path(args.log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        written: list[Path] = []

        def log_hook(label: str, state: FlowState) -> None:
            written.append(_write_flow_log(log_dir / (label + ".csv"), state))

    # The pendant strands only meet when 2*alpha is under the splice's
    # transient closure depth, so its default amplitudes sit lower.
    if args.alphas is not None:
        alphas_given = args.alphas
    elif args.kind == "embeddedness":
        alphas_given = "0.001,0.002,0.005"
    else:
        alphas_given = "0.01,0.02,0.05"

    if args.kind == "li-yau":
        report = li_yau_sweep(args.n if args.n is not None else 500, seed=args.seed)
    elif args.kind == "graphicality":
        alphas = [float(s) for s in alphas_given.split(",")]
        report = graphicality_threshold_experiment(
            alphas, config=config, rho=args.rho, log_hook=log_hook
        )
    elif args.kind == "embeddedness":
        alphas = [float(s) for s in alphas_given.split(",")]
        report = embeddedness_threshold_experiment(
            alphas, config=config, rho=args.rho, log_hook=log_hook
        )
    else:
        report = below_threshold_graphicality_experiment(
            n_data=args.n if args.n is not None else 10,
            seed=args.seed,
            config=config,
            log_hook=log_hook,
        )

    sys.stdout.write(_sweep_summary(report) + "\n")
    sys.stdout.write(_to_json(report) + "\n")
    if args.out:
        out = Path(args.out)
        out.write_text(_to_json(report) + "\n")
        outputs = [str(out)]
        if log_dir is not None:
            outputs.extend(str(p) for p in written)
        manifest = RunManifest(
            command=argv,
            config={
                "kind": args.kind,
                "seed": args.seed,
                "n": args.n,
                "alphas": alphas_given,
                "rho": args.rho,
            },
            inputs=[],
            outputs=outputs,
            wall_time_s=time.perf_counter() - t0,
        )
        manifest.write(out)
    return EXIT_OK


def _cmd_cut_paste(args, argv: list[str]) -> int:
    t0 = time.perf_counter()
    piece_paths = [s.strip() for s in args.pieces.split(",") if s.strip()]
    if not piece_paths:
        raise UsageError("need at least one piece")
    pieces = [read_curve(p) for p in piece_paths]
    if args.segments:
        segments = [float(s) for s in args.segments.split(",")]
    else:
        segments = [0.0] * (len(pieces) - 1)
    glued = cut_and_paste(pieces, segments, tol=args.tol)
    out = Path(args.out)
    write_curve(out, glued)
    outputs = [str(out), str(out.with_suffix(".json"))]
    if args.svg:
        outputs.append(str(_write_svg(Path(args.svg), glued)))
    rep = energies(glued)
    parts = sum(energies(p).energy for p in pieces)
    manifest = RunManifest(
        command=argv,
        config={"pieces": piece_paths, "segments": segments, "tol": args.tol},
        inputs=piece_paths,
        outputs=outputs,
        wall_time_s=time.perf_counter() - t0,
        result={
            "energy": rep.energy,
            "piece_energy_sum": parts,
            "additivity_defect": abs(rep.energy - parts),
        },
    )
    manifest.write(out)
    sys.stdout.write(
        "energy=%.17g pieces=%.17g defect=%.3g\n"
        % (rep.energy, parts, abs(rep.energy - parts))
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring


def _build_parser() -> _Parser:
    parser = _Parser(prog="elastica-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="sample a named curve family to CSV")
    p.add_argument("family")
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--R", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--radius", type=float)
    p.add_argument("--length", type=float)
    p.add_argument("--y", type=float)
    p.set_defaults(handler=_cmd_construct)

    p = sub.add_parser("energy", help="print the energy report of a curve file")
    p.add_argument("input")
    p.add_argument("--out", help="also write the JSON report here")
    p.set_defaults(handler=_cmd_energy)

    p = sub.add_parser("flow", help="integrate the penalized elastic flow")
    p.add_argument("input")
    p.add_argument("--out-curve", required=True, dest="out_curve")
    p.add_argument("--log", help="flow log CSV (default: next to the curve)")
    p.add_argument("--svg")
    p.add_argument("--stop", default=",".join(STOP_CRITERIA),
                   help="comma list of stop criteria, or 'none'")
    _add_flow_flags(p)
    p.set_defaults(handler=_cmd_flow)

    p = sub.add_parser("verify", help="run the self-check suites")
    p.add_argument("--suite", help="comma list (default: all suites)")
    p.add_argument("--out", help="write a JSON report here")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("sweep", help="randomized experiments and bound sweeps")
    p.add_argument("kind", help="one of: %s" % ", ".join(_SWEEP_KINDS))
    p.add_argument("--n", type=int, help="sample count (li-yau, below-threshold)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alphas", help="comma list; default 0.01,0.02,0.05"
                   " (graphicality) or 0.001,0.002,0.005 (embeddedness)")
    p.add_argument("--rho", type=float, default=0.15)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--log-dir", dest="log_dir", help="per-run flow logs go here")
    _add_flow_flags(p)
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("cut-paste", help="glue curve files with straight segments")
    p.add_argument("--pieces", required=True, help="comma list of curve files")
    p.add_argument("--segments", help="comma list of segment lengths (default zeros)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    p.set_defaults(handler=_cmd_cut_paste)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args, argv)
    except UsageError as exc:
        sys.stderr.write("usage error: %s\n" % exc)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        sys.stderr.write("missing file: %s\n" % exc)
        return EXIT_USAGE
    except _NUMERICAL_ERRORS as exc:
        sys.stderr.write("numerical failure: %s\n" % exc)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
