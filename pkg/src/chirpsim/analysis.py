"""
Observables extracted from trajectories: dressed states and their
adiabaticity, population locking, quantum-beat spectra, superposition
quality and logical-state classification.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .pulse import extent
from .system import GHZ, hamiltonian_series

GAP_FLOOR = 1e-9  # rad/ps
LOCK_MAX_EXCURSION = 0.1
LOCK_MIN_MEAN = 0.4
ADIABATIC_THRESHOLD = 0.1
PEAK_FACTOR = 5.0
MIN_BEAT_SAMPLES = 256


@dataclass
class DressedTrajectory:
    """Instantaneous eigenstates of H(t), branch-tracked through time.

    ``energies[k, b]`` is the energy of branch b at ``times[k]``;
    ``characters[k, b, i]`` its squared overlap with bare state i.
    """

    times: np.ndarray
    energies: np.ndarray
    characters: np.ndarray
    vectors: np.ndarray
    hamiltonians: np.ndarray


def _greedy_match(overlap):
    """perm[b] = column of the current eigenvector continuing branch b."""
    n = overlap.shape[0]
    perm = np.full(n, -1)
    work = overlap.copy()
    for _ in range(n):
        # argmax returns the first (lowest index) maximum, which fixes ties
        b, col = np.unravel_index(np.argmax(work), work.shape)
        perm[b] = col
        work[b, :] = -1.0
        work[:, col] = -1.0
    return perm


def dressed_states(traj):
    """Diagonalize H at every stored time and follow branches by overlap."""
    hs = hamiltonian_series(traj.system, traj.pulse, traj.times)
    w, v = np.linalg.eigh(hs)
    n_t, n = w.shape
    energies = np.empty_like(w)
    vectors = np.empty_like(v)
    energies[0], vectors[0] = w[0], v[0]
    for k in range(1, n_t):
        overlap = np.abs(vectors[k - 1].conj().T @ v[k])
        perm = _greedy_match(overlap)
        energies[k] = w[k, perm]
        vectors[k] = v[k][:, perm]
    characters = np.abs(np.swapaxes(vectors, 1, 2)) ** 2
    return DressedTrajectory(traj.times, energies, characters, vectors, hs)


@dataclass
class AdiabaticityReport:
    times: np.ndarray
    metric: np.ndarray
    peak: float
    peak_time: float
    threshold: float = ADIABATIC_THRESHOLD
    near_crossing: bool = False
    window: tuple = None

    @property
    def adiabatic(self):
        return self.peak < self.threshold


def adiabaticity(dressed, traj=None, window=None, threshold=ADIABATIC_THRESHOLD):
    """max_{m != n} |<m|dH/dt|n>| / (E_m - E_n)^2 at each stored time.

    dH/dt is a centred difference over the stored samples. Gaps below
    1e-9 rad/ps are floored there and reported through ``near_crossing``.
    ``window`` restricts the time range used for the peak.
    """
    times = dressed.times
    if len(times) < 2:
        raise ConfigurationError("adiabaticity needs at least two stored samples")
    dh = np.gradient(dressed.hamiltonians, times, axis=0)
    v = dressed.vectors
    coupling = np.abs(np.conj(np.swapaxes(v, 1, 2)) @ dh @ v)
    e = dressed.energies
    gap = np.abs(e[:, :, None] - e[:, None, :])
    n = e.shape[1]
    off = ~np.eye(n, dtype=bool)
    flagged = (gap < GAP_FLOOR) & off
    ratio = np.where(off, coupling / np.maximum(gap, GAP_FLOOR) ** 2, 0.0)
    metric = ratio.reshape(len(times), -1).max(axis=1)
    mask = np.ones(len(times), dtype=bool)
    if window is not None:
        mask = (times >= window[0]) & (times <= window[1])
        if not mask.any():
            raise ConfigurationError(f"window {window} contains no samples")
    idx = np.flatnonzero(mask)[np.argmax(metric[mask])]
    return AdiabaticityReport(
        times, metric, float(metric[idx]), float(times[idx]), threshold,
        bool(flagged[mask].any()), None if window is None else tuple(window),
    )


@dataclass
class LockingReport:
    level: int
    window: tuple
    mean: float
    excursion: float
    max_excursion: float = LOCK_MAX_EXCURSION
    min_mean: float = LOCK_MIN_MEAN

    @property
    def locked(self):
        return self.excursion <= self.max_excursion and self.mean >= self.min_mean


def _window_mask(times, window):
    lo, hi = window
    if hi <= lo:
        raise ConfigurationError(f"empty window {window}")
    if lo < times[0] - 1e-9 or hi > times[-1] + 1e-9:
        raise ConfigurationError(f"window {window} outside the grid [{times[0]}, {times[-1]}]")
    mask = (times >= lo) & (times <= hi)
    if not mask.any():
        raise ConfigurationError(f"window {window} contains no samples")
    return mask


def detect_locking(traj, level, window, max_excursion=LOCK_MAX_EXCURSION,
                   min_mean=LOCK_MIN_MEAN):
    """Mean and peak-to-peak of one population over ``window``."""
    pop = traj.populations[_window_mask(traj.times, window), level]
    return LockingReport(level, tuple(window), float(pop.mean()), float(np.ptp(pop)),
                         max_excursion, min_mean)


@dataclass
class BeatSpectrum:
    frequencies: np.ndarray  # GHz
    amplitudes: np.ndarray
    peaks: np.ndarray  # GHz
    peak_amplitudes: np.ndarray
    resolution: float  # GHz
    overlaps_pulse: bool = False


def beat_spectrum(traj, level, window, taper="hann", min_relative=0.0, pulse_rel=1e-4):
    """Spectrum of a population after the pulse.

    The mean-subtracted series is tapered (Hann by default) and Fourier
    transformed. Peaks are local maxima above 5x the median amplitude and,
    if ``min_relative`` > 0, above that fraction of the largest amplitude.
    """
    mask = _window_mask(traj.times, window)
    t = traj.times[mask]
    y = traj.populations[mask, level]
    spacing = np.diff(t)
    # the last stored sample may sit off the stride; keep the uniform part
    keep = np.r_[True, np.abs(spacing - spacing[0]) < 1e-9 * max(1.0, abs(t[-1]))]
    uniform = np.cumprod(keep).astype(bool)
    t, y = t[uniform], y[uniform]
    if len(t) < MIN_BEAT_SAMPLES:
        raise ConfigurationError(f"beat window has {len(t)} samples, need {MIN_BEAT_SAMPLES}")
    dt = t[1] - t[0]
    if taper == "hann":
        w = np.hanning(len(y))
    elif taper in ("rect", "rectangular", None):
        w = np.ones(len(y))
    else:
        raise ConfigurationError(f"unknown taper {taper!r}")
    spec = np.abs(np.fft.rfft((y - y.mean()) * w)) * 2.0 / w.sum()
    freqs = np.fft.rfftfreq(len(y), d=dt) * 1e3  # 1/ps -> GHz
    floor = max(PEAK_FACTOR * np.median(spec), min_relative * spec.max())
    inner = np.arange(1, len(spec) - 1)
    is_peak = (spec[inner] > spec[inner - 1]) & (spec[inner] >= spec[inner + 1]) & (spec[inner] > floor)
    idx = inner[is_peak]
    lo, hi = extent(traj.pulse, pulse_rel)
    overlaps = traj.pulse.peak_rabi > 0 and t[0] < hi and t[-1] > lo
    return BeatSpectrum(freqs, spec, freqs[idx], spec[idx], 1e3 / (len(y) * dt), bool(overlaps))


def expected_beats(system):
    """Pairwise eigenvalue differences (GHz) of the static excited block."""
    e = np.linalg.eigvalsh(system.excited_block())
    i, j = np.triu_indices(len(e), 1)
    return np.abs(e[j] - e[i]) / GHZ


@dataclass
class SuperpositionReport:
    members: tuple
    deviation: float
    min_coherence: float


def superposition_quality(rho, members):
    """Deviation of member populations from equal share, and the weakest coherence."""
    members = tuple(sorted(set(int(m) for m in members)))
    if not members:
        raise ConfigurationError("members must be nonempty")
    rho = np.asarray(rho)
    pops = np.real(np.diag(rho))[list(members)]
    dev = float(np.max(np.abs(pops - 1.0 / len(members))))
    if len(members) == 1:
        coh = float(pops[0])
    else:
        coh = min(abs(rho[i, j]) for k, i in enumerate(members) for j in members[k + 1:])
    return SuperpositionReport(members, dev, float(coh))


UNCLASSIFIED = None


def classify_logical(rho, threshold=0.9):
    """Index of the unique level with population >= threshold, else None."""
    if not 0.5 < threshold <= 1.0:
        raise ConfigurationError(f"threshold must lie in (0.5, 1], got {threshold}")
    pops = np.real(np.diag(np.asarray(rho)))
    hits = np.flatnonzero(pops >= threshold)
    return int(hits[0]) if len(hits) == 1 else UNCLASSIFIED
