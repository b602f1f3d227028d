import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimirkit.constants import C, HBAR, K_B
from casimirkit.errors import DomainError
from casimirkit.spectra import (
    OBSERVED_ENERGY_DENSITY,
    VACUUM_PREFACTOR,
    Planck,
    ScaledVacuum,
    Tabulated,
    TwoLevelAtom,
    Vacuum,
    drag_factor,
    drag_force,
    eval_spectral,
    spectral_from_dict,
    unruh_acceleration,
    unruh_temperature,
    vacuum_energy_budget,
)

OMEGA_VISIBLE = 3e15


def _planck_rho(omega, t):
    return HBAR * omega**3 / (math.pi**2 * C**3) / (math.exp(HBAR * omega / (K_B * t)) - 1)


def test_vacuum_spectrum_and_derivative():
    rho, drho = eval_spectral(Vacuum(), 2e14)
    assert rho == pytest.approx(HBAR * (2e14) ** 3 / (2 * math.pi**2 * C**3), rel=1e-14)
    assert drho == pytest.approx(3 * rho / 2e14, rel=1e-14)
    rho2, _ = eval_spectral(ScaledVacuum(2.5), 2e14)
    assert rho2 == pytest.approx(2.5 * rho, rel=1e-14)


@pytest.mark.parametrize("t", [3.0, 300.0, 6000.0])
def test_planck_spectrum(t):
    w = 2.0 * K_B * t / HBAR
    rho, drho = eval_spectral(Planck(t), w)
    assert rho == pytest.approx(_planck_rho(w, t), rel=1e-12)
    h = 1e-5 * w
    fd = (_planck_rho(w + h, t) - _planck_rho(w - h, t)) / (2 * h)
    assert drho == pytest.approx(fd, rel=1e-7)


def test_planck_vanishes_when_cold():
    assert eval_spectral(Planck(0.0), 1e14) == (0.0, 0.0)
    assert eval_spectral(Planck(1e-3), 1e15) == (0.0, 0.0)
    assert drag_factor(Planck(0.0), 1e14) == 0.0


def test_tabulated_spline_follows_planck():
    t = 300.0
    w = np.linspace(1e12, 2e14, 2000)
    tab = Tabulated(w, [_planck_rho(x, t) for x in w])
    for x in (5e12, 3e13, 1.1e14):
        rho, drho = eval_spectral(tab, x)
        rho_p, drho_p = eval_spectral(Planck(t), x)
        assert rho == pytest.approx(rho_p, rel=1e-6)
        assert drho == pytest.approx(drho_p, rel=1e-4)
    with pytest.raises(DomainError):
        eval_spectral(tab, 3e14)


def test_tabulated_validation():
    with pytest.raises(DomainError):
        Tabulated([1, 2, 3], [1, 2, 3])
    with pytest.raises(DomainError):
        Tabulated([1, 3, 2, 4], [1, 1, 1, 1])
    with pytest.raises(DomainError):
        Tabulated([1, 2, 3, 4], [1, -1, 1, 1])


def test_tabulated_from_csv(tmp_path):
    path = tmp_path / "spec.csv"
    path.write_text("omega,rho\n# comment\n1,1\n2,8\n3,27\n4,64\n5,125\n")
    tab = Tabulated.from_csv(path)
    assert tab.omega == (1.0, 2.0, 3.0, 4.0, 5.0)
    assert eval_spectral(tab, 2.5)[0] == pytest.approx(2.5**3, rel=5e-3)
    bad = tmp_path / "bad.csv"
    bad.write_text("1,1\n2,x\n")
    with pytest.raises(DomainError):
        Tabulated.from_csv(bad)


def test_spectral_from_dict():
    assert spectral_from_dict({"kind": "vacuum"}) == Vacuum()
    assert spectral_from_dict({"kind": "planck", "temperature": 4}) == Planck(4.0)
    with pytest.raises(DomainError):
        spectral_from_dict({"kind": "laser"})


# --- drag --------------------------------------------------------------------


@settings(max_examples=50)
@given(st.floats(1e6, 1e20), st.floats(0.0, 1e3))
def test_lorentz_invariant_spectra_give_no_drag(omega, factor):
    atom = TwoLevelAtom(omega, 1e21, 0.7, 0.3)
    assert drag_force(atom, Vacuum(), 300.0) == 0.0
    assert drag_force(atom, ScaledVacuum(factor), [1.0, -2.0, 3.0]).tolist() == [0.0, 0.0, 0.0]


def test_generic_spectrum_without_cancellation_gives_drag():
    w = np.linspace(1e14, 1e15, 50)
    flat = Tabulated(w, np.full_like(w, 1e-20))
    atom = TwoLevelAtom(5e14, 1e21, 1.0, 0.0)
    assert drag_force(atom, flat, 1.0) < 0


def test_planck_drag_factor_positive_over_six_decades():
    t = 300.0
    for w in np.geomspace(1e10, 1e16, 61):
        assert drag_factor(Planck(t), w) > 0 or HBAR * w / (K_B * t) > 700


def test_planck_drag_factor_matches_definition():
    t, w = 300.0, 4e13
    rho, drho = eval_spectral(Planck(t), w)
    assert drag_factor(Planck(t), w) == pytest.approx(rho - w / 3 * drho, rel=1e-10)


@settings(max_examples=30)
@given(st.floats(1e12, 1e15), st.floats(-1e4, 1e4), st.floats(1e18, 1e23))
def test_drag_is_linear_in_velocity_and_b12(omega, v, b12):
    atom = TwoLevelAtom.thermal(omega, b12, 300.0)
    f1 = drag_force(atom, Planck(300.0), v)
    f2 = drag_force(atom, Planck(300.0), 2 * v)
    assert f2 == pytest.approx(2 * f1, rel=1e-12, abs=1e-300)
    doubled = TwoLevelAtom.thermal(omega, 2 * b12, 300.0)
    assert drag_force(doubled, Planck(300.0), v) == pytest.approx(2 * f1, rel=1e-12, abs=1e-300)


def test_drag_vector_opposes_motion():
    atom = TwoLevelAtom.thermal(4e13, 1e21, 300.0)
    v = np.array([3.0, -4.0, 1.0])
    f = drag_force(atom, Planck(300.0), v)
    assert np.dot(f, v) < 0
    assert np.allclose(np.cross(f, v), 0, atol=1e-40)


def test_fast_atoms_warn():
    atom = TwoLevelAtom(1e14, 1.0, 1.0, 0.0)
    with pytest.warns(RuntimeWarning):
        drag_force(atom, Planck(300.0), 0.02 * C)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        drag_force(atom, Planck(300.0), 1e3)


def test_atom_validation():
    with pytest.raises(DomainError):
        TwoLevelAtom(1e14, 1.0, 0.6, 0.6)
    with pytest.raises(DomainError):
        TwoLevelAtom(-1.0, 1.0, 1.0, 0.0)
    cold = TwoLevelAtom.thermal(1e14, 1.0, 0.0)
    assert (cold.p1, cold.p2) == (1.0, 0.0)
    warm = TwoLevelAtom.thermal(1e14, 1.0, 1e4)
    assert warm.p2 / warm.p1 == pytest.approx(math.exp(-HBAR * 1e14 / (K_B * 1e4)), rel=1e-12)


# --- Unruh and vacuum budget -----------------------------------------------


@settings(max_examples=50)
@given(st.floats(1e-15, 1e15))
def test_unruh_round_trip(t):
    assert unruh_temperature(unruh_acceleration(t)) == pytest.approx(t, rel=1e-13)


def test_unruh_values():
    assert unruh_acceleration(300.0) == pytest.approx(7.398e22, rel=1e-3)
    assert unruh_acceleration(1e-12) == pytest.approx(2.466e8, rel=1e-3)
    with pytest.raises(DomainError):
        unruh_temperature(0.0)


def test_vacuum_budget_scaling():
    a = vacuum_energy_budget(1e-35)
    b = vacuum_energy_budget(2e-35)
    assert b.energy_density == pytest.approx(a.energy_density / 16, rel=1e-13)
    assert a.energy_density == pytest.approx(HBAR * a.cutoff_omega**4 / (8 * math.pi**2 * C**3), rel=1e-14)
    assert a.observed_energy_density == OBSERVED_ENERGY_DENSITY
    assert a.mass_density == pytest.approx(a.energy_density / C**2 / 1000, rel=1e-14)
    assert a.orders_of_magnitude_gap == pytest.approx(math.log10(a.energy_density / OBSERVED_ENERGY_DENSITY))
    with pytest.raises(DomainError):
        vacuum_energy_budget(0.0)


def test_vacuum_prefactor():
    assert VACUUM_PREFACTOR == pytest.approx(HBAR / (2 * math.pi**2 * C**3), rel=1e-15)
