"""
Phase-modulated laser pulses.

The driving field is described by a real amplitude envelope and a Taylor
expanded instantaneous phase

    phi(t) = b0 + b1 t + b2 t^2 + ... + b5 t^5

whose derivative (the frequency sweep) enters the rotating-frame Hamiltonian
as a time dependent detuning. The chirp polynomial is always evaluated
relative to the pulse peak, ``t - center_time``.

Units: time in ps, angular frequencies in rad/ps.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

ENVELOPES = ("gaussian", "sech", "cos_squared")
MAX_CHIRP_TERMS = 6

# Width parameters that give an *intensity* FWHM of 1.
_GAUSS_RATE = 2.0 * math.log(2.0)  # amplitude = exp(-rate (t/F)^2)
_SECH_TAU = 1.0 / (2.0 * math.acosh(math.sqrt(2.0)))
_COS2_HALF = math.pi / (4.0 * math.acos(2.0 ** -0.25))


@dataclass(frozen=True)
class ChirpCoefficients:
    """Taylor coefficients ``b[n]`` of the instantaneous phase, in rad/ps^n."""

    b: tuple = ()

    def __post_init__(self):
        b = tuple(float(x) for x in self.b)
        if len(b) > MAX_CHIRP_TERMS:
            raise ConfigurationError(
                f"at most {MAX_CHIRP_TERMS} chirp coefficients (b0..b5), got {len(b)}"
            )
        if not all(math.isfinite(x) for x in b):
            raise ConfigurationError("chirp coefficients must be finite")
        object.__setattr__(self, "b", b)

    @classmethod
    def single(cls, order, value):
        """Chirp with only ``b[order]`` set."""
        b = [0.0] * (order + 1)
        b[order] = value
        return cls(tuple(b))

    @classmethod
    def from_sweep(cls, sweep_coeffs):
        """Chirp whose sweep is sum_k s_k t^k, i.e. b_(k+1) = s_k / (k+1).

        ``from_sweep([0, a])`` is a linear chirp (b2 = a/2), ``[0, 0, a]``
        a quadratic chirp (b3 = a/3) and so on; the constant b0 is zero.
        """
        b = [0.0] + [float(s) / (k + 1) for k, s in enumerate(sweep_coeffs)]
        while len(b) > 1 and b[-1] == 0.0:
            b.pop()
        return cls(tuple(b))

    def __neg__(self):
        return ChirpCoefficients(tuple(-x for x in self.b))


def phase_at(chirp, t):
    """Instantaneous phase sum_n b_n t^n (Horner)."""
    t = np.asarray(t, dtype=float)
    acc = np.zeros_like(t)
    for coeff in reversed(chirp.b):
        acc = acc * t + coeff
    return acc if acc.ndim else float(acc)


def sweep_at(chirp, t):
    """Frequency sweep d(phi)/dt = sum_n n b_n t^(n-1)."""
    t = np.asarray(t, dtype=float)
    acc = np.zeros_like(t)
    for n in range(len(chirp.b) - 1, 0, -1):
        acc = acc * t + n * chirp.b[n]
    return acc if acc.ndim else float(acc)


@dataclass(frozen=True)
class PulseSpec:
    """A single chirped pulse.

    ``fwhm`` is the intensity full width at half maximum (ps) and
    ``peak_rabi`` the peak Rabi frequency after raising the envelope to the
    photon order (rad/ps). The dipole/field constants are lumped into
    ``peak_rabi``.
    """

    envelope_kind: str = "gaussian"
    fwhm: float = 1.0
    peak_rabi: float = 0.0
    chirp: ChirpCoefficients = field(default_factory=ChirpCoefficients)
    photon_order: int = 1
    center_time: float = 0.0

    def __post_init__(self):
        if self.envelope_kind not in ENVELOPES:
            raise ConfigurationError(
                f"unknown envelope kind {self.envelope_kind!r}; expected one of {ENVELOPES}"
            )
        if not (math.isfinite(self.fwhm) and self.fwhm > 0):
            raise ConfigurationError(f"fwhm must be positive, got {self.fwhm}")
        if not (math.isfinite(self.peak_rabi) and self.peak_rabi >= 0):
            raise ConfigurationError(f"peak_rabi must be >= 0, got {self.peak_rabi}")
        if int(self.photon_order) != self.photon_order or self.photon_order < 1:
            raise ConfigurationError(f"photon_order must be an integer >= 1, got {self.photon_order}")
        if not math.isfinite(self.center_time):
            raise ConfigurationError("center_time must be finite")
        if not isinstance(self.chirp, ChirpCoefficients):
            object.__setattr__(self, "chirp", ChirpCoefficients(tuple(self.chirp)))

    @property
    def support_half_width(self):
        """Half width of the cos_squared support, or inf for the other kinds."""
        if self.envelope_kind == "cos_squared":
            return _COS2_HALF * self.fwhm
        return math.inf

    def envelope(self, t):
        return envelope_at(self, t)

    def rabi(self, t):
        return rabi_at(self, t)

    def sweep(self, t):
        """Frequency sweep at absolute time ``t`` (polynomial centred on the peak)."""
        return sweep_at(self.chirp, np.asarray(t, dtype=float) - self.center_time)

    def replace(self, **changes):
        kw = dict(
            envelope_kind=self.envelope_kind,
            fwhm=self.fwhm,
            peak_rabi=self.peak_rabi,
            chirp=self.chirp,
            photon_order=self.photon_order,
            center_time=self.center_time,
        )
        kw.update(changes)
        return PulseSpec(**kw)


def envelope_at(spec, t):
    """Field amplitude envelope in [0, 1], peak 1 at ``spec.center_time``."""
    x = (np.asarray(t, dtype=float) - spec.center_time) / spec.fwhm
    kind = spec.envelope_kind
    if kind == "gaussian":
        env = np.exp(-_GAUSS_RATE * x * x)
    elif kind == "sech":
        # 1/cosh overflows gracefully to 0 for large |x|
        with np.errstate(over="ignore"):
            env = 1.0 / np.cosh(x / _SECH_TAU)
    elif kind == "cos_squared":
        u = np.abs(x) / _COS2_HALF
        env = np.where(u < 1.0, np.cos(0.5 * np.pi * np.minimum(u, 1.0)) ** 2, 0.0)
    else:
        raise ConfigurationError(f"unknown envelope kind {kind!r}")
    return env if env.ndim else float(env)


def rabi_at(spec, t):
    """Rabi frequency peak_rabi * envelope^N (real, nonnegative)."""
    env = envelope_at(spec, t)
    if spec.photon_order == 1:
        return spec.peak_rabi * env
    return spec.peak_rabi * env ** spec.photon_order


def extent(spec, rel=1e-6):
    """Interval outside which |Omega| < rel * peak_rabi."""
    level = rel ** (1.0 / spec.photon_order)  # envelope threshold
    kind = spec.envelope_kind
    if kind == "gaussian":
        half = spec.fwhm * math.sqrt(-math.log(level) / _GAUSS_RATE)
    elif kind == "sech":
        half = spec.fwhm * _SECH_TAU * math.acosh(1.0 / level)
    else:
        half = spec.fwhm * _COS2_HALF * (2.0 / math.pi) * math.acos(math.sqrt(level))
    return spec.center_time - half, spec.center_time + half


def pulse_area(spec, dt=1e-3, rel=1e-12):
    """Trapezoid estimate of the integral of Omega(t) over the pulse."""
    lo, hi = extent(spec, rel)
    n = max(int(math.ceil((hi - lo) / dt)), 2)
    t = np.linspace(lo, hi, n + 1)
    return float(np.trapezoid(rabi_at(spec, t), t))
