"""
Command line front end.

    chirpsim simulate <scenario.json> [--out DIR] [--dt PS] [--no-plots]
    chirpsim sweep <scenario.json> --param PATH --values CSVLIST [--out FILE]
    chirpsim gates <library.json> [--out FILE]
    chirpsim validate <scenario.json>

Shipped scenarios may be named without a path (``chirpsim simulate fig4_locking``).
Exit codes: 0 pass, 1 verdict failure, 2 configuration error, 3 integration failure.
"""

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

from . import __version__
from .analysis import adiabaticity, classify_logical, detect_locking, dressed_states
from .config import (dumps, field_value, parse_gate_library, parse_scenario, scenario_from_dict,
                     serialize, with_value)
from .errors import ConfigurationError, IntegrationError
from .gates import verify_tables
from .propagator import propagate
from .runner import run_scenario, write_failure, write_outputs

EXIT_OK, EXIT_VERDICT, EXIT_CONFIG, EXIT_INTEGRATION = 0, 1, 2, 3


def shipped_dir():
    return resources.files("chirpsim") / "scenarios"


def shipped_names():
    return sorted(p.name[:-5] for p in shipped_dir().iterdir() if p.name.endswith(".json"))


def resolve_path(name):
    """A file path, or the name of a shipped scenario/library."""
    p = Path(name)
    if p.exists():
        return p
    stem = name[:-5] if name.endswith(".json") else name
    candidate = shipped_dir() / f"{stem}.json"
    if candidate.is_file():
        return Path(str(candidate))
    return p  # let the parser report the missing file


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def cmd_validate(args):
    sc = parse_scenario(resolve_path(args.scenario))
    print(dumps(sc))
    return EXIT_OK


def cmd_simulate(args):
    sc = parse_scenario(resolve_path(args.scenario))
    out = Path(args.out) if args.out else Path("runs") / sc.name
    try:
        result = run_scenario(sc, dt=args.dt)
    except IntegrationError as err:
        path = write_failure(sc, err, out)
        _err(f"{err} (diagnostics in {path})")
        return EXIT_INTEGRATION
    written = write_outputs(result, out, plots=not args.no_plots)
    traj = result.trajectory
    print(f"{sc.name}: {traj.stats['n_steps']} steps, dt = {traj.stats['dt']:.6g} ps")
    print("final populations: " + " ".join(f"{p:.4f}" for p in traj.populations[-1]))
    for a in result.analyses:
        verdict = {True: "pass", False: "FAIL"}.get(a.get("pass"), "info")
        print(f"  {a['kind']:<14}{verdict}")
    print(f"wrote {', '.join(written)} to {out}")
    return EXIT_OK if result.passed else EXIT_VERDICT


def _sweep_one(payload):
    data, path, value = payload
    row = {"value": value, "populations": None, "label": None, "locked": None,
           "adiabaticity_peak": None, "error": ""}
    try:
        sc = with_value(scenario_from_dict(data), path, value)
        traj = propagate(sc.build_system(), sc.build_pulse(), sc.build_grid(), sc.rho0(),
                         sc.grid.store_samples)
        row["populations"] = [float(p) for p in traj.populations[-1]]
        row["label"] = classify_logical(traj.final)
        window = None
        for a in sc.analyses:
            if a.kind == "locking" and row["locked"] is None:
                row["locked"] = detect_locking(traj, a.level, a.window_ps, a.max_excursion,
                                               a.min_mean).locked
            if a.kind == "adiabaticity" and window is None:
                window = a.window_ps
        row["adiabaticity_peak"] = adiabaticity(dressed_states(traj), traj, window).peak
    except (ConfigurationError, IntegrationError) as err:
        row["error"] = str(err).replace("\n", " ")
    return row


def sweep_rows(scenario, path, values, jobs=None):
    """One row per value, in input order; failures are recorded, not raised."""
    if not values:
        return []
    field_value(scenario, path)  # fail early on a bad path
    payloads = [(serialize(scenario), path, v) for v in values]
    jobs = jobs or min(len(values), os.cpu_count() or 1)
    if jobs <= 1:
        return [_sweep_one(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_one, payloads))


def sweep_csv(rows, n_levels):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value"] + [f"pop_{i}" for i in range(n_levels)]
               + ["label", "locked", "adiabaticity_peak", "error"])
    for r in rows:
        pops = r["populations"] or [""] * n_levels
        w.writerow([repr(r["value"])] + [repr(p) if p != "" else "" for p in pops]
                   + ["" if r["label"] is None else r["label"],
                      "" if r["locked"] is None else str(r["locked"]).lower(),
                      "" if r["adiabaticity_peak"] is None else repr(r["adiabaticity_peak"]),
                      r["error"]])
    return buf.getvalue()


def _parse_values(text):
    text = text.strip()
    if not text:
        return []
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise ConfigurationError(f"--values must be a comma separated list of numbers, got {text!r}") from None


def cmd_sweep(args):
    sc = parse_scenario(resolve_path(args.scenario))
    values = _parse_values(args.values)
    rows = sweep_rows(sc, args.param, values, args.jobs)
    text = sweep_csv(rows, sc.build_system().n_levels)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, newline="\n")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_gates(args):
    cfg, library = parse_gate_library(resolve_path(args.library))
    report = verify_tables(library, cfg.threshold)
    print(report.format_table())
    payload = {"tool": "chirpsim", "version": __version__, "library": cfg.model_dump(mode="json")}
    payload.update(report.to_dict())
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", newline="\n")
    return EXIT_OK if report.passed else EXIT_VERDICT


def build_parser():
    p = argparse.ArgumentParser(prog="chirpsim", description="Chirped-pulse density-matrix simulator.")
    p.add_argument("--version", action="version", version=f"chirpsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one scenario and write CSV, JSON and SVG outputs")
    s.add_argument("scenario")
    s.add_argument("--out", help="output directory (default runs/<name>)")
    s.add_argument("--dt", type=float, help="override the time step (ps)")
    s.add_argument("--no-plots", action="store_true")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", help="vary one numeric scenario field")
    s.add_argument("scenario")
    s.add_argument("--param", required=True, help="dotted key path, e.g. pulse.b2_rad_per_ps2")
    s.add_argument("--values", required=True, help="comma separated values")
    s.add_argument("--out", help="also write the CSV table here")
    s.add_argument("--jobs", type=int, help="worker processes (default: one per CPU)")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("gates", help="verify the gate truth tables for a pulse library")
    s.add_argument("library")
    s.add_argument("--out", help="write the JSON report here")
    s.set_defaults(func=cmd_gates)

    s = sub.add_parser("validate", help="parse a scenario and print it with defaults filled")
    s.add_argument("scenario")
    s.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as err:
        _err(str(err))
        return EXIT_CONFIG
    except IntegrationError as err:
        _err(str(err))
        return EXIT_INTEGRATION


if __name__ == "__main__":
    sys.exit(main())
