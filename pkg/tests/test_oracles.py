import math

import pytest
from scipy import integrate

import oracles


@pytest.mark.parametrize("r", [0.1, 0.45, 0.9])
def test_cube_quadrature_matches_polynomial_part(r):
    assert oracles.cube_pair_density(r) == pytest.approx(oracles.cube_polynomial_part(r), rel=1e-10)


def test_cube_quadrature_normalization():
    pieces = ((0.0, 1.0),) + oracles.CUBE_PIECES
    total = sum(integrate.quad(oracles.cube_pair_density, lo, hi, epsabs=1e-13)[0] for lo, hi in pieces)
    assert total == pytest.approx(1.0, abs=1e-10)


def test_frozen_cube_pure_term_reproduces():
    assert oracles.cube_pure_term() == pytest.approx(oracles.CUBE_PURE_TERM, rel=1e-9)
    assert oracles.CUBE_PURE_TERM < 0


def test_planar_oracle_matches_closed_form_pressure():
    # -dE/dd of the energy oracle is the pairwise plate pressure 207 / (640 pi^2 d^4)
    d, h = 1.3, 1e-5
    p = -(oracles.planar_energy_oracle(d + h) - oracles.planar_energy_oracle(d - h)) / (2 * h)
    assert p == pytest.approx(-207 / (640 * math.pi**2 * d**4), rel=1e-8)
