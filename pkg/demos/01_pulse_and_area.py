"""Pulse shapes, instantaneous sweep and the area theorem on a resonant two-level system."""
import numpy as np

from chirpsim import ChirpCoefficients, PulseSpec, TimeGrid, default_dt, propagate, pulse_area, sweep_at, two_level

# a chirp is a polynomial phase; the sweep is its time derivative
chirp = ChirpCoefficients((0.0, 0.0, 0.05, 1e-3))
for t in (-10.0, 0.0, 10.0):
    print(f"sweep at t={t:+.0f} ps: {sweep_at(chirp, t):+.4f} rad/ps")

# unchirped resonant pulses: the final excited population is sin^2(area/2)
system = two_level(0.0)
for peak in (0.5, 1.0, 2.0):
    pulse = PulseSpec("gaussian", 2.0, peak)
    traj = propagate(system, pulse, TimeGrid(-8.0, 8.0, default_dt(system, pulse, -8.0, 8.0)))
    area = pulse_area(pulse)
    print(f"peak {peak:.1f} rad/ps  area {area:.3f}  P1 {traj.populations[-1, 1]:.6f}"
          f"  sin^2(A/2) {np.sin(area / 2) ** 2:.6f}")
