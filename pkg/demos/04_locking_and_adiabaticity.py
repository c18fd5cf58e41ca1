"""A strong chirped pulse locks the ground population near one half while staying adiabatic."""
from chirpsim import adiabaticity, detect_locking, dressed_states
from chirpsim.runner import run_scenario

from _common import shipped

res = run_scenario(shipped("fig4_locking"))
traj = res.trajectory
lock = detect_locking(traj, 0, (-20.0, 20.0))
print(f"ground population over [-20, 20] ps: mean {lock.mean:.3f}, excursion {lock.excursion:.3f},"
      f" locked {lock.locked}")
print(f"ground population after the pulse: {traj.populations[-1, 0]:.3f}")
adi = adiabaticity(dressed_states(traj), traj, window=(-40.0, 40.0))
print(f"peak non-adiabatic coupling {adi.peak:.3f} (threshold {adi.threshold}), adiabatic {adi.adiabatic}")
