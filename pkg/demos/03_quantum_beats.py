"""Beats in the excited population after a weak pulse reveal the eigen-spacings of the coupled manifold."""
import numpy as np

from chirpsim import beat_spectrum, expected_beats
from chirpsim.runner import run_scenario

from _common import shipped

res = run_scenario(shipped("fig3a_anthracene"))
spec = beat_spectrum(res.trajectory, 1, (100.0, 5000.0), min_relative=1e-3)
print(f"resolution {spec.resolution:.3f} GHz")
print("expected GHz:", np.sort(expected_beats(res.trajectory.system)).round(2))
print("found GHz:   ", np.sort(spec.peaks).round(2))
