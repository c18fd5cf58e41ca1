"""
Scenario execution: propagate, evaluate the requested analyses and write
the trajectory CSV, the analysis JSON and SVG plots.
"""

import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (adiabaticity, beat_spectrum, classify_logical, detect_locking,
                       dressed_states, expected_beats, superposition_quality)
from .config import serialize
from .propagator import convergence_check, propagate, propagate_oracle


@dataclass
class RunResult:
    scenario: object
    trajectory: object
    analyses: list = field(default_factory=list)
    dressed: object = None

    @property
    def passed(self):
        return all(a.get("pass", True) is not False for a in self.analyses)

    def report(self):
        traj = self.trajectory
        return {
            "tool": "chirpsim",
            "version": __version__,
            "scenario": serialize(self.scenario),
            "dt_ps": traj.stats["dt"],
            "n_steps": traj.stats["n_steps"],
            "final_populations": [float(p) for p in traj.populations[-1]],
            "analyses": self.analyses,
            "pass": self.passed,
        }


def _get_dressed(result):
    if result.dressed is None:
        result.dressed = dressed_states(result.trajectory)
    return result.dressed


def _match_beats(peaks, expected, resolution):
    """Every expected line is detected and every detected peak is explained, within one bin."""
    if len(expected) == 0:
        return len(peaks) == 0
    if len(peaks) == 0:
        return False
    found = all(np.min(np.abs(peaks - e)) <= resolution for e in expected)
    explained = all(np.min(np.abs(expected - p)) <= resolution for p in peaks)
    return bool(found and explained)


def evaluate(result, spec):
    """One analysis entry as a JSON-ready dict with an optional ``pass`` verdict."""
    traj, sc = result.trajectory, result.scenario
    pulse = traj.pulse
    out = {"kind": spec.kind}
    if spec.kind == "locking":
        rep = detect_locking(traj, spec.level, spec.window_ps, spec.max_excursion, spec.min_mean)
        final = float(traj.populations[-1, spec.level])
        ok = spec.expect_locked is None or rep.locked == spec.expect_locked
        if spec.expect_dephasing:
            ok = ok and final < rep.mean
        out.update(level=spec.level, window_ps=list(rep.window), mean=rep.mean,
                   excursion=rep.excursion, locked=rep.locked, final=final, **{"pass": ok})
    elif spec.kind == "adiabaticity":
        rep = adiabaticity(_get_dressed(result), traj, spec.window_ps, spec.threshold)
        out.update(peak=rep.peak, peak_time_ps=rep.peak_time, threshold=rep.threshold,
                   adiabatic=rep.adiabatic, near_crossing=rep.near_crossing)
        if spec.expect_adiabatic is not None:
            out["pass"] = rep.adiabatic == spec.expect_adiabatic
    elif spec.kind == "beats":
        spec_ = beat_spectrum(traj, spec.level, spec.window_ps, spec.taper, spec.min_relative)
        exp = expected_beats(traj.system)
        matched = _match_beats(spec_.peaks, exp, spec_.resolution)
        out.update(level=spec.level, peaks_ghz=spec_.peaks.tolist(),
                   peak_amplitudes=spec_.peak_amplitudes.tolist(),
                   expected_ghz=sorted(exp.tolist()), resolution_ghz=spec_.resolution,
                   overlaps_pulse=spec_.overlaps_pulse, matched=matched)
        if spec.expect_match:
            out["pass"] = matched
    elif spec.kind == "superposition":
        t = pulse.center_time if spec.time_ps is None else spec.time_ps
        rep = superposition_quality(traj.rho_at(t), spec.members)
        out.update(members=list(rep.members), time_ps=float(traj.times[traj.index_at(t)]),
                   deviation=rep.deviation, min_coherence=rep.min_coherence)
        if spec.max_deviation is not None:
            out["pass"] = rep.deviation <= spec.max_deviation
    elif spec.kind == "classify":
        t = traj.times[-1] if spec.time_ps is None else spec.time_ps
        label = classify_logical(traj.rho_at(t), spec.threshold)
        out.update(time_ps=float(traj.times[traj.index_at(t)]), label=label,
                   threshold=spec.threshold)
        if spec.expect is not None:
            out["pass"] = label == spec.expect
    elif spec.kind == "population":
        t = traj.times[-1] if spec.time_ps is None else spec.time_ps
        value = float(traj.rho_at(t)[spec.level, spec.level].real)
        ok = (spec.min is None or value >= spec.min) and (spec.max is None or value <= spec.max)
        out.update(level=spec.level, time_ps=float(traj.times[traj.index_at(t)]), value=value,
                   min=spec.min, max=spec.max, **{"pass": ok})
    elif spec.kind == "conservation":
        rhos = traj.rhos
        trace = float(np.max(np.abs(np.einsum("kii->k", rhos).real - 1.0)))
        purity = np.einsum("kij,kji->k", rhos, rhos).real
        drift = float(np.max(np.abs(purity - purity[0])))
        low = float(np.min(np.linalg.eigvalsh(rhos)[:, 0]))
        out.update(trace_error=trace, purity_drift=drift, min_eigenvalue=low,
                   **{"pass": trace <= spec.trace_tol and drift <= spec.purity_tol
                      and low >= -spec.eig_tol})
    elif spec.kind == "oracle":
        ref = propagate_oracle(traj.system, pulse, traj.grid, sc.rho0(),
                               sc.grid.store_samples, spec.scheme)
        dev = float(np.max(np.abs(ref.populations - traj.populations)))
        out.update(scheme=spec.scheme, max_deviation=dev, tolerance=spec.tolerance,
                   **{"pass": dev <= spec.tolerance})
    elif spec.kind == "convergence":
        rep = convergence_check(traj.system, pulse, traj.grid, sc.rho0(), spec.threshold)
        out.update(dt_ps=rep.dt, max_deviation=rep.max_deviation,
                   final_deviation=rep.final_deviation, threshold=rep.threshold,
                   **{"pass": rep.converged})
    return out


def run_scenario(scenario, dt=None):
    """Propagate and evaluate; IntegrationError propagates to the caller."""
    system, pulse = scenario.build_system(), scenario.build_pulse()
    grid = scenario.build_grid(dt)
    traj = propagate(system, pulse, grid, scenario.rho0(), scenario.grid.store_samples)
    result = RunResult(scenario, traj)
    result.analyses = [evaluate(result, a) for a in scenario.analyses]
    return result


# output files ----------------------------------------------------------------

def _provenance(result):
    return {"tool": "chirpsim", "version": __version__,
            "dt_ps": result.trajectory.stats["dt"], "scenario": serialize(result.scenario)}


def trajectory_csv(result):
    traj = result.trajectory
    n = traj.system.n_levels
    buf = io.StringIO()
    prov = _provenance(result)
    buf.write(f"# chirpsim {prov['version']}\n")
    buf.write(f"# dt_ps={prov['dt_ps']!r}\n")
    buf.write("# scenario=" + json.dumps(prov["scenario"], sort_keys=True) + "\n")
    cols = ["time_ps"] + [f"pop_{i}" for i in range(n)] + [f"|rho_0{i}|" for i in range(1, n)]
    buf.write(",".join(cols) + "\n")
    data = np.column_stack([traj.times, traj.populations, traj.coherences])
    for row in data:
        buf.write(",".join(repr(float(x)) for x in row) + "\n")
    return buf.getvalue()


def report_json(result):
    return json.dumps(result.report(), indent=2, sort_keys=True) + "\n"


def _plot_svgs(result):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "chirpsim"
    traj = result.trajectory
    dressed = _get_dressed(result)
    n = traj.system.n_levels
    figs = {}

    fig, ax = plt.subplots(figsize=(7, 4))
    for i in range(n):
        ax.plot(traj.times, traj.populations[:, i], label=f"|{i}>")
    ax.set_xlabel("time (ps)")
    ax.set_ylabel("population")
    ax.legend(loc="best", fontsize="small")
    figs["populations.svg"] = fig

    fig, ax = plt.subplots(figsize=(7, 4))
    for b in range(n):
        ax.plot(dressed.times, dressed.energies[:, b] / (2 * np.pi * 1e-3), label=f"branch {b}")
    ax.set_xlabel("time (ps)")
    ax.set_ylabel("dressed energy (GHz)")
    ax.legend(loc="best", fontsize="small")
    figs["dressed_energies.svg"] = fig

    fig, axes = plt.subplots(n, 1, figsize=(7, 1.6 * n), sharex=True, squeeze=False)
    for b in range(n):
        ax = axes[b, 0]
        for i in range(n):
            ax.plot(dressed.times, dressed.characters[:, b, i], label=f"|{i}>")
        ax.set_ylabel(f"branch {b}", fontsize="small")
        ax.set_ylim(-0.05, 1.05)
    axes[0, 0].legend(loc="upper right", fontsize="x-small", ncol=min(n, 5))
    axes[-1, 0].set_xlabel("time (ps)")
    figs["dressed_characters.svg"] = fig

    out = {}
    for name, fig in figs.items():
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
        out[name] = buf.getvalue()
    return out


def write_outputs(result, out_dir, plots=True):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    oc = result.scenario.outputs
    if oc.csv:
        (out_dir / "trajectory.csv").write_text(trajectory_csv(result), newline="\n")
        written.append("trajectory.csv")
    if oc.json_report:
        (out_dir / "analysis.json").write_text(report_json(result), newline="\n")
        written.append("analysis.json")
    if plots and oc.plots:
        for name, svg in _plot_svgs(result).items():
            (out_dir / name).write_text(svg, newline="\n")
            written.append(name)
    return written


def write_failure(scenario, err, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    diag = {"tool": "chirpsim", "version": __version__, "error": str(err),
            "time_ps": getattr(err, "time", None), "scenario": serialize(scenario)}
    path = out_dir / "failure.json"
    path.write_text(json.dumps(diag, indent=2, sort_keys=True) + "\n", newline="\n")
    return path
