import math

import numpy as np
import pytest

from chirpsim.errors import ConfigurationError, IntegrationError
from chirpsim.propagator import (TimeGrid, basis_state, check_density_matrix, convergence_check,
                                 default_dt, propagate, propagate_oracle)
from chirpsim.pulse import ChirpCoefficients, PulseSpec
from chirpsim.system import anthracene_preset, three_level, two_level

GAUSS_UNIT = math.sqrt(math.pi / (2 * math.log(2)))  # integral of the unit-FWHM gaussian envelope


def area_pulse(area, fwhm=2.0):
    return PulseSpec("gaussian", fwhm, area / (fwhm * GAUSS_UNIT))


def grid_for(system, pulse, lo, hi):
    return TimeGrid(lo, hi, default_dt(system, pulse, lo, hi))


def test_time_grid_rules():
    g = TimeGrid(0.0, 1.0, 0.3)
    assert g.n_steps == 3 and g.step == pytest.approx(1 / 3)
    assert g.halved().n_steps == 6
    for bad in ((1.0, 0.0, 0.1), (0.0, 1.0, 0.0), (0.0, 1.0, 1e-8)):
        with pytest.raises(ConfigurationError):
            TimeGrid(*bad)


def test_zero_field_preserves_populations():
    # without intramolecular couplings H is diagonal, so any populations stay put
    rho0 = np.full((3, 3), 1 / 3, dtype=complex)
    tr = propagate(three_level(-0.3, 0.4), PulseSpec(fwhm=1.0), TimeGrid(0, 50, 0.05), rho0)
    np.testing.assert_allclose(tr.populations, 1 / 3, atol=1e-12)
    ground = propagate(anthracene_preset(), PulseSpec(fwhm=1.0), TimeGrid(0, 50, 0.05))
    assert np.all(ground.populations == ground.populations[0])


@pytest.mark.parametrize("area", [math.pi / 2, math.pi, 2 * math.pi])
def test_area_theorem(area):
    s, p = two_level(0.0), area_pulse(area)
    tr = propagate(s, p, grid_for(s, p, -12, 12))
    assert tr.populations[-1, 1] == pytest.approx(math.sin(area / 2) ** 2, abs=1e-4)
    ref = propagate_oracle(s, p, grid_for(s, p, -12, 12))
    assert ref.populations[-1, 1] == pytest.approx(math.sin(area / 2) ** 2, abs=1e-4)


def test_commutator_sign():
    # for i[rho, H], resonant drive first raises the excited population
    s, p = two_level(0.0), area_pulse(math.pi)
    tr = propagate(s, p, grid_for(s, p, -1, 1))
    assert np.all(np.diff(tr.populations[:, 1]) > 0)
    # a detuned drive must rotate the coherence with the sign fixed by i[rho, H]
    s = two_level(0.5)
    rho0 = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    tr = propagate(s, PulseSpec(fwhm=1.0), TimeGrid(0, 1.0, 1e-3), rho0)
    # d rho_01/dt = i (rho H - H rho)_01 = i rho_01 (H11 - H00) -> rho_01 = 0.5 exp(i delta t)
    assert tr.final[0, 1] == pytest.approx(0.5 * np.exp(0.5j), abs=1e-10)


def test_oracle_agreement_chirped_three_level():
    s = three_level(-0.5, 0.5)
    p = PulseSpec("sech", 10.0, 0.8, ChirpCoefficients((0, 0, 0.03)))
    g = grid_for(s, p, -30, 30)
    a, b = propagate(s, p, g), propagate_oracle(s, p, g)
    np.testing.assert_array_equal(a.times, b.times)
    assert np.max(np.abs(a.populations - b.populations)) < 1e-6


def test_midpoint_oracle_is_second_order():
    s, p = two_level(0.1), PulseSpec("gaussian", 2.0, 1.2, ChirpCoefficients((0, 0, 0.2)))
    exact = propagate_oracle(s, p, TimeGrid(-6, 6, 1e-3)).populations[-1, 1]
    e1 = abs(propagate_oracle(s, p, TimeGrid(-6, 6, 0.04), scheme="midpoint").populations[-1, 1] - exact)
    e2 = abs(propagate_oracle(s, p, TimeGrid(-6, 6, 0.02), scheme="midpoint").populations[-1, 1] - exact)
    assert 3.0 < e1 / e2 < 5.0
    with pytest.raises(ConfigurationError):
        propagate_oracle(s, p, TimeGrid(-6, 6, 0.02), scheme="euler")


def test_rk4_is_fourth_order():
    s, p = two_level(0.1), PulseSpec("gaussian", 2.0, 1.2, ChirpCoefficients((0, 0, 0.2)))
    exact = propagate_oracle(s, p, TimeGrid(-6, 6, 2e-3)).populations[-1, 1]
    e1 = abs(propagate(s, p, TimeGrid(-6, 6, 0.08)).populations[-1, 1] - exact)
    e2 = abs(propagate(s, p, TimeGrid(-6, 6, 0.04)).populations[-1, 1] - exact)
    assert 10 < e1 / e2 < 24


def test_stored_samples_and_invariants():
    s, p = anthracene_preset(), PulseSpec("gaussian", 20.0, 0.5, ChirpCoefficients((0, 0, 0.002)))
    tr = propagate(s, p, grid_for(s, p, -60, 60), store_samples=500)
    assert 500 <= len(tr.times) <= 502
    assert tr.times[0] == -60 and tr.times[-1] == pytest.approx(60)
    np.testing.assert_allclose(tr.populations.sum(axis=1), 1.0, atol=1e-9)
    np.testing.assert_array_equal(tr.rhos, np.conj(np.swapaxes(tr.rhos, 1, 2)))
    purity = np.einsum("kij,kji->k", tr.rhos, tr.rhos).real
    assert np.max(np.abs(purity - 1)) < 1e-7
    assert tr.stats["max_hermitian_drift"] <= 1e-10
    assert tr.coherences.shape == (len(tr.times), 4)


def test_default_dt_bounds_rate():
    s, p = two_level(0.3), PulseSpec("gaussian", 5.0, 2.0, ChirpCoefficients((0, 0, 0.1)))
    dt = default_dt(s, p, -10, 10)
    t = np.linspace(-10, 10, 2001)
    rate = max(np.max(p.rabi(t)), np.max(np.abs(0.3 + p.sweep(t))))
    assert rate * dt <= 0.05
    assert default_dt(two_level(0.0), PulseSpec(fwhm=1.0), 0, 10) == pytest.approx(0.01)


def test_coarse_dt_raises_integration_error():
    s, p = two_level(0.0), PulseSpec("gaussian", 2.0, 40.0)
    with pytest.raises(IntegrationError) as err:
        propagate(s, p, TimeGrid(-5, 5, 0.2))
    assert err.value.time is not None and -5 <= err.value.time <= 5


def test_convergence_check():
    s = two_level(0.0)
    zero = convergence_check(s, PulseSpec(fwhm=1.0), TimeGrid(0, 5, 0.01))
    assert zero.max_deviation == 0 and zero.converged
    p = area_pulse(math.pi)
    fine = convergence_check(s, p, grid_for(s, p, -8, 8))
    assert fine.max_deviation < 1e-8
    # ten steps per Rabi period at the pulse peak
    coarse = convergence_check(s, p, TimeGrid(-8, 8, 2 * math.pi / p.peak_rabi / 10))
    assert not coarse.converged


def test_density_matrix_checks():
    with pytest.raises(ConfigurationError):
        check_density_matrix(np.eye(2))
    with pytest.raises(ConfigurationError):
        check_density_matrix(np.array([[1, 0.1], [0.2, 0]]))
    with pytest.raises(ConfigurationError):
        check_density_matrix(np.array([[1.5, 0], [0, -0.5]]))
    with pytest.raises(ConfigurationError):
        check_density_matrix(basis_state(3), 2)
    with pytest.raises(ConfigurationError):
        propagate(two_level(), PulseSpec(fwhm=1.0), TimeGrid(0, 1, 0.1), basis_state(3))


def test_trajectory_lookup():
    tr = propagate(two_level(), PulseSpec(fwhm=1.0), TimeGrid(0, 1, 0.1))
    assert tr.index_at(0.52) == 5
    np.testing.assert_array_equal(tr.rho_at(1.0), tr.final)
