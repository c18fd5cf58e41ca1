"""
Density-matrix propagation for the FM-frame Hamiltonian.

``propagate`` integrates d(rho)/dt = i [rho, H(t)] (hbar = 1) with fixed-step
classical RK4. ``propagate_oracle`` is an independent check that applies a
per-step unitary built from a fourth-order Magnus generator, so it conserves
trace and positivity exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, IntegrationError
from ._kernels import rk4_liouville
from .system import hamiltonian_series, static_parts

DEFAULT_STORE_SAMPLES = 2000
MAX_STEPS = 10_000_000
STEP_PHASE = 0.01  # rad per step; keeps RK4 positivity loss well below 1e-9
TRACE_FAIL = 1e-6
NEGATIVITY_FAIL = -1e-6
CONVERGENCE_TOL = 1e-6

_CHUNK = 4096  # oracle steps per vectorized eigh batch


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    dt: float

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.t_start, self.t_end, self.dt)):
            raise ConfigurationError("time grid values must be finite")
        if self.t_end <= self.t_start:
            raise ConfigurationError("t_end must be greater than t_start")
        if self.dt <= 0:
            raise ConfigurationError("dt must be positive")
        if (self.t_end - self.t_start) / self.dt > MAX_STEPS:
            raise ConfigurationError(f"grid needs more than {MAX_STEPS} steps")

    @property
    def n_steps(self):
        return max(int(round((self.t_end - self.t_start) / self.dt)), 1)

    @property
    def step(self):
        """Actual step, ``dt`` adjusted so the grid ends exactly at t_end."""
        return (self.t_end - self.t_start) / self.n_steps

    def halved(self):
        return TimeGrid(self.t_start, self.t_end, self.step / 2)


def default_dt(system, pulse, t_start, t_end, phase=STEP_PHASE, samples=20001):
    """Largest dt with rate * dt <= phase over the grid.

    The rate is the larger of max(|Omega|, |delta|, |V|) and the spectral
    spread max_t (E_max - E_min) of H(t), which is what bounds the
    commutator and hence the RK4 error for many coupled levels.
    """
    t = np.linspace(t_start, t_end, samples)
    rabi = np.max(pulse.rabi(t)) * max((abs(w) for w in system.bright_weights), default=0.0)
    rabi *= system.coupling_scale
    sweep = pulse.photon_order * pulse.sweep(t)
    det = np.asarray(system.detunings)
    delta = np.max(np.abs(det[None, :] + sweep[:, None]))
    v = max((abs(x) for x in system.couplings.values()), default=0.0)
    e = np.linalg.eigvalsh(hamiltonian_series(system, pulse, t))
    spread = np.max(e[:, -1] - e[:, 0])
    rate = max(rabi, delta, v, spread)
    if rate == 0:
        return (t_end - t_start) / 1000
    return min(phase / rate, (t_end - t_start) / 1000)


def basis_state(n, k=0):
    rho = np.zeros((n, n), dtype=complex)
    rho[k, k] = 1.0
    return rho


def check_density_matrix(rho, n=None, herm_tol=1e-12, trace_tol=1e-9, eig_tol=-1e-9):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ConfigurationError(f"density matrix must be square, got shape {rho.shape}")
    if n is not None and rho.shape[0] != n:
        raise ConfigurationError(f"density matrix is {rho.shape[0]}x{rho.shape[0]}, system has {n} levels")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise ConfigurationError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > trace_tol:
        raise ConfigurationError("density matrix trace is not 1")
    if np.linalg.eigvalsh(rho).min() < eig_tol:
        raise ConfigurationError("density matrix is not positive semidefinite")
    return rho


@dataclass
class Trajectory:
    """Stored samples of rho(t) together with the inputs that produced them."""

    times: np.ndarray
    rhos: np.ndarray
    grid: TimeGrid
    system: object
    pulse: object
    method: str = "rk4"
    stats: dict = field(default_factory=dict)

    @property
    def populations(self):
        return np.real(np.einsum("kii->ki", self.rhos))

    @property
    def coherences(self):
        """|rho_0i| for i = 1..n-1."""
        return np.abs(self.rhos[:, 0, 1:])

    @property
    def final(self):
        return self.rhos[-1]

    def index_at(self, t):
        return int(np.argmin(np.abs(self.times - t)))

    def rho_at(self, t):
        return self.rhos[self.index_at(t)]


def _stride(n_steps, store_samples):
    if store_samples is None:
        store_samples = DEFAULT_STORE_SAMPLES
    return max(1, n_steps // max(store_samples, 1))


def _prepare(system, pulse, grid, rho0):
    n = system.n_levels
    rho = basis_state(n) if rho0 is None else check_density_matrix(rho0, n).copy()
    h0, d, c = static_parts(system)
    return rho, h0.astype(complex), d * pulse.photon_order, c


def _hamiltonians(h0, d, c, pulse, times):
    sweep = pulse.sweep(times)
    rabi = pulse.rabi(times)
    return h0 + sweep[:, None, None] * d + rabi[:, None, None] * c


def _store_indices(n_steps, stride):
    idx = list(range(0, n_steps + 1, stride))
    if idx[-1] != n_steps:
        idx.append(n_steps)
    return idx


def propagate(system, pulse, grid, rho0=None, store_samples=DEFAULT_STORE_SAMPLES,
              check_positivity=True):
    """Fixed-step RK4 on d(rho)/dt = i [rho, H(t)].

    The Hermitian part is re-imposed after each step; the trace is not
    renormalized. Raises IntegrationError when the trace drifts by more than
    1e-6 at any step, or a stored sample has an eigenvalue below -1e-6.
    """
    rho, h0, d, c = _prepare(system, pulse, grid, rho0)
    n_steps, h = grid.n_steps, grid.step
    stride = _stride(n_steps, store_samples)
    stored = np.asarray(_store_indices(n_steps, stride), dtype=np.int64)
    nodes = grid.t_start + h * np.arange(n_steps + 1)
    mids = nodes[:-1] + 0.5 * h
    samples, failed, max_herm = rk4_liouville(
        rho, h0, np.diag(d).astype(float), c.astype(float),
        pulse.sweep(nodes), pulse.rabi(nodes), pulse.sweep(mids), pulse.rabi(mids),
        h, stored, TRACE_FAIL,
    )
    if failed >= 0:
        t = float(nodes[failed])
        raise IntegrationError(f"trace drifted beyond {TRACE_FAIL:g} at t = {t:.6g} ps; reduce dt",
                               time=t)
    times = nodes[stored]
    if check_positivity:
        low = np.linalg.eigvalsh(samples)[:, 0]
        bad = np.flatnonzero(low < NEGATIVITY_FAIL)
        if bad.size:
            t = float(times[bad[0]])
            raise IntegrationError(
                f"eigenvalue {low[bad[0]]:.3e} < 0 at t = {t:.6g} ps; reduce dt", time=t
            )
    return Trajectory(
        times, samples, grid, system, pulse, "rk4",
        {"dt": h, "n_steps": n_steps, "stride": stride, "max_hermitian_drift": float(max_herm)},
    )


def propagate_oracle(system, pulse, grid, rho0=None, store_samples=DEFAULT_STORE_SAMPLES,
                     scheme="magnus4"):
    """Unitary stepping rho <- U rho U^dagger, U = exp(-i G) per step.

    ``scheme="magnus4"`` uses the two-point Gauss-Legendre Magnus generator
    G = h (H1 + H2)/2 - i (sqrt(3) h^2 / 12) [H2, H1];
    ``scheme="midpoint"`` uses G = h H(t + h/2) (second order).
    """
    if scheme not in ("magnus4", "midpoint"):
        raise ConfigurationError(f"unknown oracle scheme {scheme!r}")
    rho, h0, d, c = _prepare(system, pulse, grid, rho0)
    n_steps, h = grid.n_steps, grid.step
    stride = _stride(n_steps, store_samples)
    store = set(_store_indices(n_steps, stride))
    times, rhos = [grid.t_start], [rho.copy()]
    gauss = math.sqrt(3.0) / 6.0
    comm = math.sqrt(3.0) * h * h / 12.0
    for start in range(0, n_steps, _CHUNK):
        stop = min(start + _CHUNK, n_steps)
        t_left = grid.t_start + h * np.arange(start, stop)
        if scheme == "midpoint":
            gens = h * _hamiltonians(h0, d, c, pulse, t_left + 0.5 * h)
        else:
            h1 = _hamiltonians(h0, d, c, pulse, t_left + (0.5 - gauss) * h)
            h2 = _hamiltonians(h0, d, c, pulse, t_left + (0.5 + gauss) * h)
            gens = 0.5 * h * (h1 + h2) - 1j * comm * (h2 @ h1 - h1 @ h2)
        w, v = np.linalg.eigh(gens)
        us = (v * np.exp(-1j * w)[:, None, :]) @ np.conj(np.swapaxes(v, 1, 2))
        for k in range(stop - start):
            u = us[k]
            rho = u @ rho @ u.conj().T
            step = start + k + 1
            if step in store:
                times.append(grid.t_start + h * step)
                rhos.append(rho.copy())
    return Trajectory(
        np.asarray(times), np.asarray(rhos), grid, system, pulse, f"oracle-{scheme}",
        {"dt": h, "n_steps": n_steps, "stride": stride},
    )


@dataclass
class ConvergenceReport:
    dt: float
    max_deviation: float
    final_deviation: float
    threshold: float

    @property
    def converged(self):
        return self.max_deviation <= self.threshold


def convergence_check(system, pulse, grid, rho0=None, threshold=CONVERGENCE_TOL):
    """Compare runs at dt and dt/2 over the final populations and stored samples.

    Both runs store on the same time points (the fine run keeps every second
    step relative to the coarse stride).
    """
    coarse = propagate(system, pulse, grid, rho0, store_samples=DEFAULT_STORE_SAMPLES,
                       check_positivity=False)
    fine_grid = grid.halved()
    stride = coarse.stats["stride"] * 2
    fine = propagate(system, pulse, fine_grid, rho0, store_samples=fine_grid.n_steps // stride,
                     check_positivity=False)
    n = min(len(coarse.times), len(fine.times))
    same = np.allclose(coarse.times[:n], fine.times[:n], atol=1e-9 * max(1.0, abs(grid.t_end)))
    if same and len(coarse.times) == len(fine.times):
        dev = np.max(np.abs(coarse.populations - fine.populations))
    else:
        dev = np.max(np.abs(coarse.populations[-1] - fine.populations[-1]))
    final = float(np.max(np.abs(coarse.populations[-1] - fine.populations[-1])))
    return ConvergenceReport(grid.step, float(max(dev, final)), final, threshold)
