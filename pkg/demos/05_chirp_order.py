"""Odd-order sweeps invert a resonant two-level system, even-order sweeps return it to ground."""
from chirpsim import classify_logical
from chirpsim.runner import run_scenario

from _common import shipped

for order in ("linear", "quadratic", "cubic", "quartic"):
    res = run_scenario(shipped(f"chirp_order_{order}"))
    p1 = res.trajectory.populations[-1, 1]
    print(f"{order:9s} sweep: P1 = {p1:.4f}  -> level {classify_logical(res.trajectory.final)}")
