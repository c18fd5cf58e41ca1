"""Cross-check the RK4 integrator against a Magnus propagator and against a halved step."""
import numpy as np

from chirpsim import convergence_check, propagate, propagate_oracle

from _common import shipped

sc = shipped("fig1b")
system, pulse, grid = sc.build_system(), sc.build_pulse(), sc.build_grid()
rk4 = propagate(system, pulse, grid)
mag = propagate_oracle(system, pulse, grid)
print(f"dt {grid.step:.2e} ps, {grid.n_steps} steps")
print(f"max |rho_rk4 - rho_magnus| {np.abs(rk4.rhos - mag.rhos).max():.2e}")
conv = convergence_check(system, pulse, grid)
print(f"dt vs dt/2 population deviation {conv.max_deviation:.2e}, converged {conv.converged}")
trace = np.einsum("kii->k", rk4.rhos).real
print(f"trace drift {np.abs(trace - 1).max():.1e}, min eigenvalue {np.linalg.eigvalsh(rk4.rhos).min():.1e}")
