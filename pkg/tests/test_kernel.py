import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from casimirkit.analytic import atom_half_space_pairwise
from casimirkit.errors import DomainError
from casimirkit.kernel import (
    N_ALPHA_MAX,
    PERFECT_CONDUCTOR,
    Material,
    casimir_plate_pressure,
    casimir_polder_potential,
    gradient_force,
    n_alpha_from_epsilon,
    retarded_vdw,
)


def test_retarded_kernel_unit_values():
    assert retarded_vdw(1.0, 1.0) == pytest.approx(-1.830282, abs=1e-6)
    assert retarded_vdw(2.0, 1.0) == pytest.approx(-23 / (4 * math.pi) / 128, rel=1e-14)
    assert retarded_vdw(1.0, 2.0) == pytest.approx(4 * retarded_vdw(1.0, 1.0), rel=1e-14)


@pytest.mark.parametrize("r", [0.0, -1.0])
def test_retarded_kernel_rejects_nonpositive_r(r):
    with pytest.raises(DomainError):
        retarded_vdw(r, 1.0)


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(0.0, 10.0))
def test_retarded_kernel_scaling(r, lam, alpha):
    assert retarded_vdw(lam * r, alpha) == pytest.approx(lam**-7 * retarded_vdw(r, alpha), rel=1e-12, abs=1e-300)


def test_n_alpha_values():
    assert n_alpha_from_epsilon(1.0) == 0.0
    assert n_alpha_from_epsilon(PERFECT_CONDUCTOR) == 3 / (4 * math.pi)
    assert n_alpha_from_epsilon(PERFECT_CONDUCTOR) == pytest.approx(0.2387324, abs=1e-7)
    assert n_alpha_from_epsilon(4.0) == pytest.approx(0.1193662, abs=1e-7)


def test_n_alpha_rejects_subvacuum_epsilon():
    with pytest.raises(DomainError):
        n_alpha_from_epsilon(0.5)


@given(st.floats(1.0, 1e12), st.floats(1.0, 1e12))
def test_n_alpha_monotone_and_bounded(e1, e2):
    lo, hi = sorted((e1, e2))
    assert n_alpha_from_epsilon(lo) <= n_alpha_from_epsilon(hi) <= N_ALPHA_MAX


def test_material_consistency_check():
    m = Material.from_epsilon(4.0, alpha=2.0)
    assert m.n_alpha == pytest.approx(0.1193662, abs=1e-7)
    with pytest.raises(DomainError):
        Material(alpha=1.0, number_density=0.1, epsilon=4.0)
    with pytest.raises(DomainError):
        Material(alpha=-1.0, number_density=0.1)


def test_perfect_conductor_sentinel_is_exact():
    m = Material.perfect_conductor()
    assert m.epsilon == math.inf
    assert m.n_alpha == 3 / (4 * math.pi)
    assert m.to_dict()["epsilon"] == "inf"


def test_casimir_polder_values():
    assert casimir_polder_potential(1.0, 1.0) == pytest.approx(-0.1193662, abs=1e-7)
    assert casimir_polder_potential(2.0, 1.0) == pytest.approx(casimir_polder_potential(1.0, 1.0) / 16, rel=1e-14)
    with pytest.raises(DomainError):
        casimir_polder_potential(0.0, 1.0)


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_pairwise_atom_wall_is_115_percent_of_casimir_polder(d, alpha):
    ratio = atom_half_space_pairwise(d, alpha, N_ALPHA_MAX) / casimir_polder_potential(d, alpha)
    assert ratio == pytest.approx(1.15, rel=1e-12)


def test_plate_pressure_values():
    assert casimir_plate_pressure(1.0) == pytest.approx(-0.0411234, abs=1e-7)
    assert casimir_plate_pressure(10.0) == pytest.approx(-4.11234e-6, rel=1e-5)
    with pytest.raises(DomainError):
        casimir_plate_pressure(-1.0)


def test_gradient_force_casimir_polder_profile():
    f = gradient_force(lambda d: casimir_polder_potential(d, 1.0), 1.0, 1.0)
    # attractive: the force points toward the wall at d = 0
    assert f == pytest.approx(-3 / (2 * math.pi), rel=1e-8)
    assert abs(f) == pytest.approx(0.4774648, abs=1e-7)


def test_gradient_force_uniform_profile():
    assert gradient_force(lambda x: 3.0, 1.0, np.array([0.2, -1.0, 4.0])) == pytest.approx([0, 0, 0], abs=1e-12)


def test_gradient_force_field_square_mode():
    assert gradient_force(lambda x: x * x, 2.0, 1.0, mode="field_square") == pytest.approx(2.0, rel=1e-8)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_gradient_force_matches_polynomial_derivatives(c1, c2, c3, x, y):
    profile = lambda p: c1 * p[0] ** 3 + c2 * p[0] * p[1] + c3 * p[1] ** 2
    grad = np.array([3 * c1 * x * x + c2 * y, c2 * x + 2 * c3 * y])
    f = gradient_force(profile, 1.0, np.array([x, y]))
    scale = max(1.0, float(np.abs(grad).max()))
    assert f == pytest.approx(-grad, rel=1e-8, abs=1e-8 * scale)


def test_gradient_force_outside_domain():
    with pytest.raises(DomainError):
        gradient_force(lambda d: casimir_polder_potential(d, 1.0), 1.0, 0.0)


def test_gradient_force_rejects_unknown_mode():
    with pytest.raises(DomainError):
        gradient_force(lambda x: x, 1.0, 1.0, mode="magic")
