"""
Level systems and the frequency-modulated (FM) frame Hamiltonian.

Energies are angular frequencies in rad/ps with hbar = 1. Level 0 is the
ground state at zero energy; every other level i carries its static detuning
plus the common sweep term, delta_i(t) = Delta_i + N * dphi/dt. Bright levels
couple to the ground state with the Rabi frequency, intramolecular couplings
V_ij are static.

Off-diagonal convention: the two-level matrix uses Omega/2, the three-level
and multilevel matrices use the bare Omega.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

GHZ = 2.0 * math.pi * 1e-3
"""rad/ps per GHz (cyclic)."""

# Nonzero intramolecular couplings of the ten-level tier model.
TIER_PATTERN = frozenset(
    [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5), (2, 6), (2, 7),
     (3, 6), (3, 7), (3, 8), (3, 9)]
)

ANTHRACENE_DETUNINGS_GHZ = (3.23, 1.7, 7.57, 3.7)
ANTHRACENE_COUPLINGS_GHZ = {
    (1, 2): -0.28, (1, 3): -4.24, (1, 4): -1.86,
    (2, 3): 0.29, (2, 4): 1.82, (3, 4): 0.94,
}


def _normalize_couplings(couplings, n_levels):
    out = {}
    for key, value in dict(couplings).items():
        i, j = (int(k) for k in key)
        if i == j:
            raise ConfigurationError(f"self-coupling V_{i}{j} not allowed")
        if min(i, j) < 1 or max(i, j) >= n_levels:
            raise ConfigurationError(
                f"coupling ({i},{j}) outside excited levels 1..{n_levels - 1}"
            )
        value = float(value)
        if not math.isfinite(value):
            raise ConfigurationError(f"coupling ({i},{j}) is not finite")
        pair = (min(i, j), max(i, j))
        if pair in out and out[pair] != value:
            raise ConfigurationError(f"coupling {pair} given twice with different values")
        out[pair] = value
    return dict(sorted(out.items()))


@dataclass(frozen=True, eq=True)
class SystemSpec:
    """Static description of a level system.

    ``detunings`` lists Delta_i for levels 1..n-1. ``couplings`` maps
    ``(i, j)`` with ``0 < i < j`` to V_ij (symmetric by construction).
    """

    n_levels: int
    detunings: tuple
    couplings: dict = field(default_factory=dict)
    bright: tuple = (1,)
    bright_weights: tuple = None

    def __post_init__(self):
        n = int(self.n_levels)
        if n != self.n_levels or n < 2:
            raise ConfigurationError(f"n_levels must be an integer >= 2, got {self.n_levels}")
        det = tuple(float(x) for x in self.detunings)
        if len(det) != n - 1:
            raise ConfigurationError(
                f"need {n - 1} detunings for {n} levels, got {len(det)}"
            )
        if not all(math.isfinite(x) for x in det):
            raise ConfigurationError("detunings must be finite")
        bright = tuple(int(b) for b in self.bright)
        if len(set(bright)) != len(bright):
            raise ConfigurationError("duplicate bright level")
        if any(b < 1 or b >= n for b in bright):
            raise ConfigurationError(f"bright levels must lie in 1..{n - 1}")
        weights = self.bright_weights
        weights = (1.0,) * len(bright) if weights is None else tuple(float(w) for w in weights)
        if len(weights) != len(bright):
            raise ConfigurationError("bright_weights must match bright levels")
        if not all(math.isfinite(w) for w in weights):
            raise ConfigurationError("bright_weights must be finite")
        object.__setattr__(self, "n_levels", n)
        object.__setattr__(self, "detunings", det)
        object.__setattr__(self, "couplings", _normalize_couplings(self.couplings, n))
        object.__setattr__(self, "bright", bright)
        object.__setattr__(self, "bright_weights", weights)

    @property
    def coupling_scale(self):
        """Off-diagonal factor applied to the Rabi frequency (1/2 for two levels)."""
        return 0.5 if self.n_levels == 2 else 1.0

    def coupling(self, i, j):
        return self.couplings.get((min(i, j), max(i, j)), 0.0)

    def excited_block(self):
        """Static Hamiltonian restricted to levels 1..n-1."""
        return static_parts(self)[0][1:, 1:]


def static_parts(sys):
    """Split H(t) = H0 + N*sweep(t)*D + Omega(t)*C into its constant matrices."""
    n = sys.n_levels
    h0 = np.zeros((n, n))
    h0[np.arange(1, n), np.arange(1, n)] = sys.detunings
    for (i, j), v in sys.couplings.items():
        h0[i, j] = h0[j, i] = v
    d = np.diag(np.r_[0.0, np.ones(n - 1)])
    c = np.zeros((n, n))
    for level, w in zip(sys.bright, sys.bright_weights):
        c[0, level] = c[level, 0] = w * sys.coupling_scale
    return h0, d, c


def build_hamiltonian(sys, pulse, t):
    """FM-frame Hamiltonian (rad/ps) at time ``t``."""
    h0, d, c = static_parts(sys)
    sweep = pulse.photon_order * pulse.sweep(t)
    rabi = pulse.rabi(t)
    return (h0 + sweep * d + rabi * c).astype(complex)


def hamiltonian_series(sys, pulse, times):
    """Stack of Hamiltonians, shape (len(times), n, n)."""
    h0, d, c = static_parts(sys)
    times = np.asarray(times, dtype=float)
    sweep = pulse.photon_order * pulse.sweep(times)
    rabi = pulse.rabi(times)
    return (h0 + sweep[:, None, None] * d + rabi[:, None, None] * c).astype(complex)


def two_level(detuning=0.0):
    return SystemSpec(2, (detuning,), {}, (1,))


def three_level(detuning_1, detuning_2, weights=(1.0, 1.0)):
    """Ground state coupled to two excited states (alkali-like V system)."""
    return SystemSpec(3, (detuning_1, detuning_2), {}, (1, 2), tuple(weights))


def anthracene_preset():
    """Five-level anthracene IVR model: bright |1> plus three dark states."""
    return SystemSpec(
        5,
        tuple(GHZ * x for x in ANTHRACENE_DETUNINGS_GHZ),
        {k: GHZ * v for k, v in ANTHRACENE_COUPLINGS_GHZ.items()},
        (1,),
    )


def tier_preset(v_table=None, omegas=(1.0, 1.0, 1.0), detunings=None):
    """Ten-level tier model: bright |1>,|2>,|3> feeding dark shells |4>..|9>.

    ``v_table`` may only populate the tier sparsity pattern; ``omegas`` are
    the relative weights of the three optical couplings.
    """
    v_table = {} if v_table is None else dict(v_table)
    for key in v_table:
        pair = (min(key), max(key))
        if pair not in TIER_PATTERN:
            raise ConfigurationError(f"coupling {pair} is a structural zero of the tier model")
    if detunings is None:
        detunings = (0.0,) * 9
    return SystemSpec(10, tuple(detunings), v_table, (1, 2, 3), tuple(omegas))
