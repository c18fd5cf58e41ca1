"""The sign of a linear chirp decides which of two levels ends up populated."""
from chirpsim import classify_logical
from chirpsim.runner import run_scenario

from _common import shipped

for name in ("fig1c_red_blue", "fig1c_blue_red"):
    sc = shipped(name)
    res = run_scenario(sc)
    pops = res.trajectory.populations[-1]
    print(f"{name}: b2={sc.build_pulse().chirp.b[2]:+.3f} rad/ps^2  final {pops.round(4)}"
          f"  -> level {classify_logical(res.trajectory.final)}  all checks pass: {res.passed}")
