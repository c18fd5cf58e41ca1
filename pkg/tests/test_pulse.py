import math

import numpy as np
import pytest

from chirpsim.errors import ConfigurationError
from chirpsim.pulse import (ENVELOPES, ChirpCoefficients, PulseSpec, envelope_at, extent, phase_at,
                            pulse_area, rabi_at, sweep_at)


def test_phase_examples():
    assert phase_at(ChirpCoefficients((0,) * 6), 3.7) == 0
    assert phase_at(ChirpCoefficients((1, 2)), 0.0) == 1
    assert phase_at(ChirpCoefficients((0, 0, 0.5)), 2.0) == pytest.approx(2.0)


def test_sweep_examples():
    assert sweep_at(ChirpCoefficients((5, 0)), 1.3) == 0
    assert sweep_at(ChirpCoefficients((0, 0.7)), -4.0) == pytest.approx(0.7)
    assert sweep_at(ChirpCoefficients((0, 0, 1)), 3.0) == pytest.approx(6.0)


def test_horner_matches_power_sum():
    b = (0.3, -1.2, 0.5, 0.01, -2e-3, 4e-5)
    t = np.linspace(-7, 7, 31)
    direct = sum(c * t**n for n, c in enumerate(b))
    dirv = sum(n * c * t ** (n - 1) for n, c in enumerate(b) if n)
    np.testing.assert_allclose(phase_at(ChirpCoefficients(b), t), direct, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(sweep_at(ChirpCoefficients(b), t), dirv, rtol=1e-12, atol=1e-12)


def test_chirp_validation():
    with pytest.raises(ConfigurationError):
        ChirpCoefficients((0,) * 7)
    with pytest.raises(ConfigurationError):
        ChirpCoefficients((0, math.nan))
    assert ChirpCoefficients.single(3, 2.0).b == (0, 0, 0, 2.0)
    assert (-ChirpCoefficients((1, -2))).b == (-1, 2)


def test_from_sweep_orders():
    # sweep s_k t^k corresponds to b_(k+1) = s_k / (k+1)
    c = ChirpCoefficients.from_sweep([0.0, 0.0, 0.3])
    assert c.b == pytest.approx((0, 0, 0, 0.1))
    t = np.linspace(-3, 3, 7)
    np.testing.assert_allclose(sweep_at(c, t), 0.3 * t**2)


def test_envelope_peak_and_half_intensity():
    for kind in ENVELOPES:
        spec = PulseSpec(kind, fwhm=3.0, center_time=1.5)
        assert envelope_at(spec, 1.5) == pytest.approx(1.0)
        for side in (-1, 1):
            assert envelope_at(spec, 1.5 + side * 1.5) ** 2 == pytest.approx(0.5, abs=1e-12)


def test_gaussian_half_width_value():
    spec = PulseSpec("gaussian", fwhm=4.0)
    assert envelope_at(spec, 2.0) == pytest.approx(2 ** -0.5)


def test_cos_squared_support():
    spec = PulseSpec("cos_squared", fwhm=2.0)
    edge = spec.support_half_width
    assert envelope_at(spec, edge) == 0.0
    assert envelope_at(spec, -edge) == 0.0
    assert np.all(envelope_at(spec, np.linspace(edge, 5 * edge, 50)) == 0.0)
    assert envelope_at(spec, 0.999 * edge) > 0
    assert PulseSpec("sech", 1.0).support_half_width == math.inf


def test_sech_width_convention():
    f = 2.5
    tau = f / (2 * math.acosh(math.sqrt(2)))
    t = np.linspace(-5, 5, 11)
    np.testing.assert_allclose(envelope_at(PulseSpec("sech", f), t), 1 / np.cosh(t / tau), rtol=1e-14)


def test_rabi_examples():
    assert rabi_at(PulseSpec(fwhm=2, peak_rabi=3.0), 0.0) == pytest.approx(3.0)
    two_photon = PulseSpec(fwhm=2, peak_rabi=3.0, photon_order=2)
    assert rabi_at(two_photon, 1.0) == pytest.approx(1.5)
    assert rabi_at(PulseSpec(fwhm=2), 0.3) == 0.0


def test_pulse_validation():
    with pytest.raises(ConfigurationError):
        PulseSpec("square", 1.0)
    with pytest.raises(ConfigurationError):
        PulseSpec(fwhm=-1.0)
    with pytest.raises(ConfigurationError):
        PulseSpec(fwhm=1.0, peak_rabi=-0.1)
    with pytest.raises(ConfigurationError):
        PulseSpec(fwhm=1.0, photon_order=0)
    assert PulseSpec(chirp=(0, 1)).chirp == ChirpCoefficients((0, 1))


def test_sweep_is_centred_on_peak():
    spec = PulseSpec(fwhm=1.0, chirp=ChirpCoefficients((0, 0, 1.0)), center_time=4.0)
    assert spec.sweep(4.0) == 0.0
    assert spec.sweep(5.0) == pytest.approx(2.0)


@pytest.mark.parametrize("kind", ENVELOPES)
def test_pulse_area_closed_forms(kind):
    f, peak = 2.0, 1.3
    closed = {
        "gaussian": f * math.sqrt(math.pi / (2 * math.log(2))),
        "sech": math.pi * f / (2 * math.acosh(math.sqrt(2))),
        # integral of cos^2(pi t / 2T) over [-T, T] is T
        "cos_squared": math.pi * f / (4 * math.acos(2 ** -0.25)),
    }[kind]
    assert pulse_area(PulseSpec(kind, f, peak)) == pytest.approx(peak * closed, rel=1e-8)


def test_pulse_area_richardson():
    spec = PulseSpec("gaussian", 1.7, 0.9)
    a1, a2 = pulse_area(spec, 1e-2), pulse_area(spec, 5e-3)
    assert abs(a1 - a2) / a2 < 1e-8


def test_extent_threshold():
    for kind in ENVELOPES:
        spec = PulseSpec(kind, 2.0, 1.0, center_time=3.0)
        lo, hi = extent(spec, 1e-4)
        assert lo == pytest.approx(6.0 - hi)
        assert rabi_at(spec, hi) == pytest.approx(1e-4, rel=1e-6)
