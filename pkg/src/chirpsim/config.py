"""
JSON scenario and gate-library files.

Keys carry their units (``fwhm_ps``, ``detunings_ghz``,
``b2_rad_per_ps2``). Frequencies may be given in GHz (cyclic, converted
with 2*pi*1e-3) or directly in rad/ps, but not both for the same field.
Unknown keys are rejected and every error names the offending key path.
"""

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigurationError
from .gates import PulseLibrary, PulseLibraryEntry
from .propagator import DEFAULT_STORE_SAMPLES, TimeGrid, check_density_matrix, default_dt
from .pulse import ENVELOPES, ChirpCoefficients, PulseSpec
from .system import GHZ, SystemSpec, anthracene_preset, tier_preset

CHIRP_KEYS = ("b0_rad", "b1_rad_per_ps", "b2_rad_per_ps2", "b3_rad_per_ps3",
              "b4_rad_per_ps4", "b5_rad_per_ps5")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def _freq(ghz, rad, name, default=None):
    """Pick the GHz or rad/ps variant of a frequency field, converting to rad/ps."""
    if ghz is not None and rad is not None:
        raise ValueError(f"give either {name}_ghz or {name}_rad_per_ps, not both")
    if ghz is not None:
        return np.asarray(ghz, dtype=float) * GHZ
    if rad is not None:
        return np.asarray(rad, dtype=float)
    return default


class SystemConfig(_Strict):
    preset: Optional[Literal["anthracene", "tier"]] = None
    n_levels: Optional[int] = Field(None, ge=2)
    detunings_ghz: Optional[list[float]] = None
    detunings_rad_per_ps: Optional[list[float]] = None
    couplings_ghz: Optional[list[tuple[int, int, float]]] = None
    couplings_rad_per_ps: Optional[list[tuple[int, int, float]]] = None
    bright: Optional[list[int]] = None
    bright_weights: Optional[list[float]] = None

    @model_validator(mode="after")
    def _check(self):
        self.build()
        return self

    def build(self):
        det = _freq(self.detunings_ghz, self.detunings_rad_per_ps, "detunings")
        cpl = _freq(self.couplings_ghz and [c[2] for c in self.couplings_ghz],
                    self.couplings_rad_per_ps and [c[2] for c in self.couplings_rad_per_ps],
                    "couplings")
        pairs = [tuple(c[:2]) for c in (self.couplings_ghz or self.couplings_rad_per_ps or [])]
        couplings = {p: float(v) for p, v in zip(pairs, [] if cpl is None else cpl)}
        if self.preset == "anthracene":
            extra = [k for k in ("n_levels", "bright", "bright_weights") if getattr(self, k) is not None]
            if extra or det is not None or couplings:
                raise ValueError("the anthracene preset takes no further system keys")
            return anthracene_preset()
        if self.preset == "tier":
            if self.n_levels not in (None, 10) or self.bright not in (None, [1, 2, 3]):
                raise ValueError("the tier preset is fixed at 10 levels with bright levels 1, 2, 3")
            weights = self.bright_weights if self.bright_weights is not None else (1.0, 1.0, 1.0)
            return tier_preset(couplings, tuple(weights), None if det is None else tuple(det))
        if self.n_levels is None or det is None:
            raise ValueError("inline systems need n_levels and detunings")
        return SystemSpec(
            self.n_levels, tuple(det), couplings,
            tuple(self.bright) if self.bright is not None else (1,),
            None if self.bright_weights is None else tuple(self.bright_weights),
        )


class PulseConfig(_Strict):
    envelope: Literal[ENVELOPES] = "gaussian"
    fwhm_ps: float = Field(gt=0, allow_inf_nan=False)
    peak_rabi_ghz: Optional[float] = Field(None, ge=0, allow_inf_nan=False)
    peak_rabi_rad_per_ps: Optional[float] = Field(None, ge=0, allow_inf_nan=False)
    photon_order: int = Field(1, ge=1)
    center_time_ps: float = Field(0.0, allow_inf_nan=False)
    b0_rad: float = Field(0.0, allow_inf_nan=False)
    b1_rad_per_ps: float = Field(0.0, allow_inf_nan=False)
    b2_rad_per_ps2: float = Field(0.0, allow_inf_nan=False)
    b3_rad_per_ps3: float = Field(0.0, allow_inf_nan=False)
    b4_rad_per_ps4: float = Field(0.0, allow_inf_nan=False)
    b5_rad_per_ps5: float = Field(0.0, allow_inf_nan=False)

    @model_validator(mode="after")
    def _check(self):
        self.build()
        return self

    def build(self):
        peak = _freq(self.peak_rabi_ghz, self.peak_rabi_rad_per_ps, "peak_rabi", 0.0)
        return PulseSpec(
            self.envelope, self.fwhm_ps, float(peak),
            ChirpCoefficients(tuple(getattr(self, k) for k in CHIRP_KEYS)),
            self.photon_order, self.center_time_ps,
        )


class GridConfig(_Strict):
    t_start_ps: float = Field(allow_inf_nan=False)
    t_end_ps: float = Field(allow_inf_nan=False)
    dt_ps: Optional[float] = Field(None, gt=0, allow_inf_nan=False)
    store_samples: int = Field(DEFAULT_STORE_SAMPLES, ge=2)

    @model_validator(mode="after")
    def _check(self):
        if self.t_end_ps <= self.t_start_ps:
            raise ValueError("t_end_ps must be greater than t_start_ps")
        if self.dt_ps is not None:
            TimeGrid(self.t_start_ps, self.t_end_ps, self.dt_ps)
        return self

    def build(self, system, pulse, dt=None):
        dt = dt or self.dt_ps or default_dt(system, pulse, self.t_start_ps, self.t_end_ps)
        return TimeGrid(self.t_start_ps, self.t_end_ps, dt)


class DensityMatrixConfig(_Strict):
    real: list[list[float]]
    imag: Optional[list[list[float]]] = None

    def build(self):
        re = np.asarray(self.real, dtype=float)
        im = np.zeros_like(re) if self.imag is None else np.asarray(self.imag, dtype=float)
        if re.shape != im.shape:
            raise ValueError("real and imag parts differ in shape")
        return re + 1j * im


# analyses ------------------------------------------------------------------

Window = tuple[float, float]


class LockingAnalysis(_Strict):
    kind: Literal["locking"]
    level: int = Field(1, ge=0)
    window_ps: Window
    max_excursion: float = Field(0.1, gt=0)
    min_mean: float = Field(0.4, ge=0)
    expect_locked: Optional[bool] = True
    expect_dephasing: bool = False  # final population of the level below the locked mean


class AdiabaticityAnalysis(_Strict):
    kind: Literal["adiabaticity"]
    window_ps: Optional[Window] = None
    threshold: float = Field(0.1, gt=0)
    expect_adiabatic: Optional[bool] = None


class BeatsAnalysis(_Strict):
    kind: Literal["beats"]
    level: int = Field(1, ge=0)
    window_ps: Window
    taper: Literal["hann", "rect"] = "hann"
    min_relative: float = Field(0.0, ge=0, lt=1)
    expect_match: bool = False  # detected peaks equal the eigenvalue differences within a bin


class SuperpositionAnalysis(_Strict):
    kind: Literal["superposition"]
    members: list[int] = Field(min_length=1)
    time_ps: Optional[float] = None
    max_deviation: Optional[float] = Field(0.1, gt=0)


class ClassifyAnalysis(_Strict):
    kind: Literal["classify"]
    threshold: float = Field(0.9, gt=0.5, le=1.0)
    time_ps: Optional[float] = None
    expect: Optional[int] = None


class PopulationAnalysis(_Strict):
    kind: Literal["population"]
    level: int = Field(ge=0)
    time_ps: Optional[float] = None
    min: Optional[float] = None
    max: Optional[float] = None


class ConservationAnalysis(_Strict):
    kind: Literal["conservation"]
    trace_tol: float = 1e-9
    purity_tol: float = 1e-7
    eig_tol: float = 1e-9


class OracleAnalysis(_Strict):
    kind: Literal["oracle"]
    tolerance: float = 1e-6
    scheme: Literal["magnus4", "midpoint"] = "magnus4"


class ConvergenceAnalysis(_Strict):
    kind: Literal["convergence"]
    threshold: float = 1e-6


Analysis = Annotated[
    Union[LockingAnalysis, AdiabaticityAnalysis, BeatsAnalysis, SuperpositionAnalysis,
          ClassifyAnalysis, PopulationAnalysis, ConservationAnalysis, OracleAnalysis,
          ConvergenceAnalysis],
    Field(discriminator="kind"),
]


class OutputsConfig(_Strict):
    csv: bool = True
    json_report: bool = True
    plots: bool = True


class Scenario(_Strict):
    name: str
    description: str = ""
    system: SystemConfig
    pulse: PulseConfig
    grid: GridConfig
    initial_state: Union[int, DensityMatrixConfig] = 0
    analyses: list[Analysis] = []
    outputs: OutputsConfig = OutputsConfig()

    @model_validator(mode="after")
    def _check(self):
        n = self.system.build().n_levels
        if isinstance(self.initial_state, int):
            if not 0 <= self.initial_state < n:
                raise ValueError(f"initial_state {self.initial_state} outside 0..{n - 1}")
        else:
            check_density_matrix(self.initial_state.build(), n)
        for a in self.analyses:
            for key in ("level",):
                lv = getattr(a, key, None)
                if lv is not None and lv >= n:
                    raise ValueError(f"{a.kind} analysis level {lv} outside 0..{n - 1}")
            members = getattr(a, "members", None)
            if members and max(members) >= n:
                raise ValueError(f"superposition members {members} outside 0..{n - 1}")
        return self

    def build_system(self):
        return self.system.build()

    def build_pulse(self):
        return self.pulse.build()

    def build_grid(self, dt=None):
        return self.grid.build(self.build_system(), self.build_pulse(), dt)

    def rho0(self):
        n = self.build_system().n_levels
        if isinstance(self.initial_state, int):
            rho = np.zeros((n, n), dtype=complex)
            rho[self.initial_state, self.initial_state] = 1.0
            return rho
        return self.initial_state.build()


def _error_path(err):
    first = err.errors()[0]
    loc = [str(x) for x in first["loc"]]
    msg = first["msg"].removeprefix("Value error, ")
    return ".".join(loc), msg


def _validate(model, data, where=""):
    try:
        return model.model_validate(data)
    except ValidationError as err:
        path, msg = _error_path(err)
        path = ".".join(p for p in (where, path) if p)
        raise ConfigurationError(f"{path or '<root>'}: {msg}") from None


def _load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigurationError(f"cannot read {path}: {err.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigurationError(f"{path}: invalid JSON ({err.msg} at line {err.lineno})") from None


def scenario_from_dict(data):
    return _validate(Scenario, data)


def parse_scenario(path):
    return scenario_from_dict(_load_json(path))


def serialize(scenario):
    """Fully resolved scenario as a JSON-ready dict (defaults materialized)."""
    return scenario.model_dump(mode="json")


def dumps(scenario):
    return json.dumps(serialize(scenario), indent=2, sort_keys=True)


def _locate(data, path):
    """(container, key) for a dotted path into serialized scenario data."""
    keys = path.split(".")
    node = data
    for i, k in enumerate(keys):
        if isinstance(node, list):
            try:
                k = int(k)
                node[k]
            except (ValueError, IndexError):
                raise ConfigurationError(f"{path}: no such index {keys[i]!r}") from None
        elif not isinstance(node, dict) or k not in node:
            raise ConfigurationError(f"{path}: no such key {k!r}")
        if i == len(keys) - 1:
            return node, k
        node = node[k]


def field_value(scenario, path):
    """Current value of a numeric field; raises for unknown or non-numeric paths."""
    node, key = _locate(serialize(scenario), path)
    old = node[key]
    if old is not None and (isinstance(old, bool) or not isinstance(old, (int, float))):
        raise ConfigurationError(f"{path}: not a numeric field")
    return old


def with_value(scenario, path, value):
    """Copy of ``scenario`` with the dotted ``path`` set to ``value``."""
    field_value(scenario, path)
    data = serialize(scenario)
    node, key = _locate(data, path)
    node[key] = value
    return scenario_from_dict(data)


# gate libraries --------------------------------------------------------------

class GateEntryConfig(_Strict):
    label: Literal["invert", "invert_to_1", "invert_to_2", "dark"]
    name: str = ""
    system: Optional[SystemConfig] = None
    pulse: Optional[PulseConfig] = None
    grid: Optional[GridConfig] = None
    permutation: Optional[list[int]] = None

    @model_validator(mode="after")
    def _check(self):
        has_pulse = None not in (self.system, self.pulse, self.grid)
        if self.permutation is None and not has_pulse:
            raise ValueError("entry needs system, pulse and grid, or a permutation")
        if self.permutation is not None and any(x is not None for x in (self.system, self.pulse)):
            raise ValueError("permutation entries take no system or pulse")
        return self

    def build(self):
        if self.permutation is not None:
            return PulseLibraryEntry(self.label, name=self.name, permutation=tuple(self.permutation))
        system, pulse = self.system.build(), self.pulse.build()
        return PulseLibraryEntry(self.label, pulse, system, self.grid.build(system, pulse), self.name)


class GateLibraryConfig(_Strict):
    name: str = ""
    description: str = ""
    threshold: float = Field(0.9, gt=0.5, le=1.0)
    table1: list[GateEntryConfig]
    table2: list[GateEntryConfig]

    def build(self):
        return PulseLibrary([e.build() for e in self.table1], [e.build() for e in self.table2])


def parse_gate_library(path):
    """Returns (GateLibraryConfig, PulseLibrary)."""
    cfg = _validate(GateLibraryConfig, _load_json(path))
    return cfg, cfg.build()
