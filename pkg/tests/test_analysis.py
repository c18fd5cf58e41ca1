import math

import numpy as np
import pytest

from chirpsim.analysis import (UNCLASSIFIED, _greedy_match, adiabaticity, beat_spectrum,
                               classify_logical, detect_locking, dressed_states, expected_beats,
                               superposition_quality)
from chirpsim.errors import ConfigurationError
from chirpsim.propagator import TimeGrid, default_dt, propagate
from chirpsim.pulse import ChirpCoefficients, PulseSpec
from chirpsim.system import GHZ, anthracene_preset, three_level, two_level

GAUSS_UNIT = math.sqrt(math.pi / (2 * math.log(2)))


def run(system, pulse, lo, hi, **kw):
    return propagate(system, pulse, TimeGrid(lo, hi, default_dt(system, pulse, lo, hi)), **kw)


def test_zero_field_anthracene_dressed_energies():
    s = anthracene_preset()
    tr = run(s, PulseSpec(fwhm=1.0), 0, 10, store_samples=50)
    d = dressed_states(tr)
    block = np.array(s.excited_block())
    want = np.sort(np.r_[0.0, np.linalg.eigvalsh(block)])
    np.testing.assert_allclose(np.sort(d.energies, axis=1), np.tile(want, (len(d.times), 1)), atol=1e-12)
    assert np.all(np.ptp(d.energies, axis=0) < 1e-12)


def test_resonant_splitting_equals_rabi():
    p = PulseSpec("gaussian", 5.0, 0.7)
    tr = run(two_level(0.0), p, -10, 10, store_samples=200)
    d = dressed_states(tr)
    gap = np.abs(d.energies[:, 1] - d.energies[:, 0])
    np.testing.assert_allclose(gap, p.rabi(d.times), atol=1e-12)


def test_far_detuned_characters_are_bare():
    tr = run(two_level(50.0), PulseSpec("gaussian", 2.0, 0.5), -5, 5, store_samples=100)
    d = dressed_states(tr)
    assert np.all(d.characters.max(axis=2) >= 0.99)


def test_dressed_invariants_along_arp():
    s = three_level(-0.94, 0.94)
    p = PulseSpec("gaussian", 20.0, 1.0, ChirpCoefficients((0, 0, 0.05)))
    tr = run(s, p, -60, 60, store_samples=400)
    d = dressed_states(tr)
    np.testing.assert_allclose(d.characters.sum(axis=2), 1.0, atol=1e-9)
    np.testing.assert_allclose(d.characters.sum(axis=1), 1.0, atol=1e-9)
    exact = np.linalg.eigvalsh(d.hamiltonians)
    np.testing.assert_allclose(np.sort(d.energies, axis=1), exact, atol=1e-10)
    # branches cross over in character: the initial ground branch ends on level 2
    start = np.argmax(d.characters[0, :, 0])
    assert np.argmax(d.characters[-1, start]) == 2


def test_greedy_match_is_permutation_with_ties():
    perm = _greedy_match(np.array([[0.5, 0.5], [0.5, 0.5]]))
    assert sorted(perm) == [0, 1] and perm[0] == 0
    rng = np.random.default_rng(3)
    for _ in range(20):
        perm = _greedy_match(rng.random((6, 6)))
        assert sorted(perm) == list(range(6))


def test_adiabaticity_zero_field_and_arp():
    tr = run(two_level(0.1), PulseSpec(fwhm=1.0), 0, 5, store_samples=50)
    rep = adiabaticity(dressed_states(tr), tr)
    assert rep.peak == 0 and np.all(rep.metric >= 0)
    p = PulseSpec("gaussian", 20.0, 2.0, ChirpCoefficients((0, 0, 0.075)))
    tr = run(two_level(0.0), p, -40, 40, store_samples=800)
    rep = adiabaticity(dressed_states(tr), tr)
    assert rep.adiabatic and rep.peak < 0.1 and not rep.near_crossing
    with pytest.raises(ConfigurationError):
        adiabaticity(dressed_states(tr), tr, window=(100, 200))


def test_adiabaticity_matches_closed_form_two_level():
    # for H = [[0, W/2], [W/2, d]] the coupling |<m|dH/dt|n>| = |W d' - d W'| / (2 E), E = sqrt(d^2+W^2)
    p = PulseSpec("gaussian", 20.0, 1.0, ChirpCoefficients((0, 0, 0.02)))
    tr = run(two_level(0.0), p, -30, 30, store_samples=3000)
    rep = adiabaticity(dressed_states(tr), tr)
    t = tr.times
    w, d = p.rabi(t), p.sweep(t)
    wd, dd = np.gradient(w, t), np.gradient(d, t)
    e = np.sqrt(d**2 + w**2)
    want = np.abs(w * dd - d * wd) / (2 * e) / e**2
    np.testing.assert_allclose(rep.metric[1:-1], want[1:-1], rtol=1e-6)


def test_near_crossing_flag():
    tr = run(three_level(0.3, 0.3), PulseSpec(fwhm=1.0), 0, 5, store_samples=20)
    assert adiabaticity(dressed_states(tr), tr).near_crossing


def test_locking_examples():
    tr = run(two_level(0.0), PulseSpec(fwhm=1.0), -5, 5, store_samples=100)
    rep = detect_locking(tr, 1, (-5, 5))
    assert rep.mean == 0 and not rep.locked
    p = PulseSpec("gaussian", 2.0, math.pi / (2.0 * GAUSS_UNIT))
    tr = run(two_level(0.0), p, -8, 8, store_samples=400)
    rep = detect_locking(tr, 1, (-8, 8))
    assert rep.excursion == pytest.approx(1.0, abs=1e-4) and not rep.locked
    with pytest.raises(ConfigurationError):
        detect_locking(tr, 1, (0, 20))
    with pytest.raises(ConfigurationError):
        detect_locking(tr, 1, (2, 1))


def test_beats_constant_population_has_no_peaks():
    tr = run(two_level(0.0), PulseSpec(fwhm=1.0), 0, 1000, store_samples=2000)
    spec = beat_spectrum(tr, 0, (0, 1000))
    assert len(spec.peaks) == 0 and np.all(spec.frequencies >= 0)


def test_beats_resolution_and_synthetic_line():
    # rotate a pure state in an isolated pair of coupled excited levels: P1 beats at the splitting
    s = anthracene_preset()
    rho0 = np.zeros((5, 5), complex)
    rho0[1, 1] = 1
    tr = run(s, PulseSpec(fwhm=1.0), 0, 4000, rho0=rho0, store_samples=4000)
    spec = beat_spectrum(tr, 1, (0, 4000), min_relative=1e-3)
    assert spec.resolution == pytest.approx(1e3 / (len(tr.times) - 1) / (tr.times[1] - tr.times[0]), rel=1e-2)
    exp = expected_beats(s)
    for f in spec.peaks:
        assert np.min(np.abs(exp - f)) <= spec.resolution
    rect = beat_spectrum(tr, 1, (0, 4000), taper="rect", min_relative=1e-3)
    big = spec.peaks[spec.peak_amplitudes > 0.1 * spec.peak_amplitudes.max()]
    for f in big:
        assert np.min(np.abs(rect.peaks - f)) <= spec.resolution
    with pytest.raises(ConfigurationError):
        beat_spectrum(tr, 1, (0, 4000), taper="kaiser")


def test_beats_flags_pulse_overlap():
    tr = run(anthracene_preset(), PulseSpec("gaussian", 20.0, 0.1), -60, 1000)
    assert beat_spectrum(tr, 1, (-60, 1000)).overlaps_pulse
    assert not beat_spectrum(tr, 1, (100, 1000)).overlaps_pulse
    with pytest.raises(ConfigurationError):
        beat_spectrum(tr, 1, (999, 1000))


def test_expected_beats_by_hand():
    s = three_level(-0.1, 0.2)
    np.testing.assert_allclose(expected_beats(s), [0.3 / GHZ])


def test_superposition_examples():
    plus = np.full((2, 2), 0.5)
    rep = superposition_quality(plus, {0, 1})
    assert rep.deviation == 0 and rep.min_coherence == 0.5
    assert superposition_quality(np.diag([1.0, 0.0]), {0, 1}).deviation == 0.5
    mixed = np.diag([0.5, 0.5])
    assert superposition_quality(mixed, {0, 1}).min_coherence == 0
    with pytest.raises(ConfigurationError):
        superposition_quality(plus, set())


def test_classify_examples():
    assert classify_logical(np.diag([1.0, 0.0])) == 0
    assert classify_logical(np.full((2, 2), 0.5)) is UNCLASSIFIED
    assert classify_logical(np.diag([0.05, 0.95, 0.0])) == 1
    with pytest.raises(ConfigurationError):
        classify_logical(np.eye(2) / 2, threshold=0.5)


def test_arp_inversion_classified_excited():
    p = PulseSpec("gaussian", 20.0, 2.0, ChirpCoefficients((0, 0, 0.075)))
    assert classify_logical(run(two_level(0.0), p, -40, 40).final) == 1
