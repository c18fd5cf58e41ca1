"""Density-matrix dynamics of few-level systems driven by chirped pulses."""

__version__ = "0.1.0"

from .errors import ConfigurationError, IntegrationError
from .pulse import ChirpCoefficients, PulseSpec, envelope_at, phase_at, pulse_area, rabi_at, sweep_at
from .system import (GHZ, SystemSpec, anthracene_preset, build_hamiltonian, three_level,
                     tier_preset, two_level)
from .propagator import (TimeGrid, Trajectory, basis_state, convergence_check, default_dt,
                         propagate, propagate_oracle)
from .analysis import (adiabaticity, beat_spectrum, classify_logical, detect_locking,
                       dressed_states, expected_beats, superposition_quality)
from .gates import (GateReport, PulseLibrary, PulseLibraryEntry, expected_table1,
                    expected_table2, run_gate_row, verify_tables)
