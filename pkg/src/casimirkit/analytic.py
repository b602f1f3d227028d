"""Closed-form results of pairwise retarded van der Waals summation.

Coefficients are kept as ``rational * pi**k`` pairs so that ratios between
the pairwise and exact results are formed exactly before the final
conversion to float.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, asdict
from fractions import Fraction

from .errors import DomainError
from .kernel import N_ALPHA_MAX, cm_factor


@dataclass(frozen=True)
class PiRational:
    """The number ``rational * pi**pi_power``."""

    rational: Fraction
    pi_power: int = 0

    def __float__(self):
        return float(self.rational) * math.pi**self.pi_power

    def __truediv__(self, other: "PiRational") -> "PiRational":
        return PiRational(self.rational / other.rational, self.pi_power - other.pi_power)

    def __mul__(self, other: "PiRational") -> "PiRational":
        return PiRational(self.rational * other.rational, self.pi_power + other.pi_power)


# Magnitudes of the d^-4 (or 1/a) coefficients, hbar = c = 1.
ATOM_WALL_PAIRWISE = PiRational(Fraction(69, 160), -1)  # * alpha / d^4, eps -> inf
ATOM_WALL_EXACT = PiRational(Fraction(3, 8), -1)  # Casimir-Polder * alpha / d^4
PLATE_PAIRWISE = PiRational(Fraction(207, 640), -2)  # / d^4
PLATE_EXACT = PiRational(Fraction(1, 240), 2)  # / d^4
BALL_PAIRWISE = PiRational(Fraction(207, 1536), -1)  # / a, times CM factor squared
ATOM_HALF_SPACE = Fraction(23, 40)  # * alpha * N alpha / d^4

#: Exact Casimir self-energy of a perfectly conducting spherical shell, in hbar c / a.
SPHERE_SHELL_EXACT = 0.09


def atom_half_space_pairwise(d: float, alpha: float, n_alpha: float) -> float:
    """Pairwise energy of an atom at distance ``d`` from a dielectric half-space."""
    if not d > 0:
        raise DomainError("atom-wall distance must be positive")
    if not 0 <= n_alpha <= N_ALPHA_MAX * (1 + 1e-15):
        warnings.warn(
            f"N*alpha = {n_alpha!r} lies outside [0, 3/4pi]; no real dielectric constant matches it",
            RuntimeWarning,
            stacklevel=2,
        )
    return -float(ATOM_HALF_SPACE) * alpha * n_alpha / d**4


def plate_plate_pairwise_pressure(d: float) -> float:
    """Pairwise force per area between two perfectly conducting half-spaces."""
    if not d > 0:
        raise DomainError("plate gap must be positive")
    return -float(PLATE_PAIRWISE) / d**4


def ball_pairwise_pure(a: float, epsilon: float) -> float:
    """Pure (cutoff-independent) pairwise self-energy of a dielectric ball.

    Positive values mean repulsion: the force on the radius, -dE/da = E/a,
    points outward.
    """
    if not a > 0:
        raise DomainError("ball radius must be positive")
    return float(BALL_PAIRWISE) * cm_factor(epsilon) ** 2 / a


@dataclass(frozen=True)
class DeviationRow:
    quantity: str
    pairwise: float
    exact: float
    ratio: float
    pairwise_force_sign: int
    exact_force_sign: int
    note: str = ""

    def to_dict(self):
        return asdict(self)


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def deviation_report() -> list[DeviationRow]:
    """Pairwise vs exact comparison for atom-wall, plate-plate and sphere.

    Values are the signed coefficients at unit distance / radius.  The force
    signs follow the convention +1 = repulsive, -1 = attractive.
    """
    aw_ratio = ATOM_WALL_PAIRWISE / ATOM_WALL_EXACT
    pp_ratio = PLATE_PAIRWISE / PLATE_EXACT
    ball = ball_pairwise_pure(1.0, math.inf)
    return [
        DeviationRow(
            "atom-wall potential",
            -float(ATOM_WALL_PAIRWISE),
            -float(ATOM_WALL_EXACT),
            float(aw_ratio),
            -1,
            -1,
            "energy * d^4 / alpha; perfect conductor",
        ),
        DeviationRow(
            "plate-plate pressure",
            -float(PLATE_PAIRWISE),
            -float(PLATE_EXACT),
            float(pp_ratio),
            -1,
            -1,
            "pressure * d^4; perfect conductors",
        ),
        DeviationRow(
            "sphere self-energy",
            ball,
            SPHERE_SHELL_EXACT,
            ball / SPHERE_SHELL_EXACT,
            # -dE/da = E/a for E proportional to 1/a
            _sign(ball),
            _sign(SPHERE_SHELL_EXACT),
            "energy * a; pairwise ball (pure term) vs conducting shell",
        ),
    ]
