"""Physical constants and the reduced unit system.

Internally every length is measured in an arbitrary unit ``L`` and
hbar = c = 1, so energies come out in units of hbar*c/L, pressures in
hbar*c/L**4 and so on.  SI only appears at the input/output boundary.

The constant values are frozen here (9 significant digits where CODATA 2018
is not exact) so that every run is reproducible regardless of which scipy
happens to be installed.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError

HBAR = 1.05457182e-34  # J s
C = 299792458.0  # m / s (exact)
K_B = 1.380649e-23  # J / K (exact)
E_CHARGE = 1.602176634e-19  # C (exact), also J per eV
ATM = 101325.0  # Pa (exact)
HBAR_C = HBAR * C  # J m

CONSTANTS = {
    "hbar": HBAR,
    "c": C,
    "k_B": K_B,
    "e": E_CHARGE,
    "atm": ATM,
    "hbar_c": HBAR_C,
}

# Length exponent of hbar*c/L**n for the quantities the toolkit converts.
_LENGTH_POWER = {
    "energy": 1,
    "energy_per_length": 2,
    "force": 2,
    "energy_per_area": 3,
    "pressure": 4,
    "energy_density": 4,
}


class UnitMode(enum.Enum):
    REDUCED = "reduced"
    SI = "si"


@dataclass(frozen=True)
class UnitSystem:
    """Reduced (hbar = c = 1) units tied to a length scale in metres.

    In ``REDUCED`` mode values pass through untouched; in ``SI`` mode
    ``length_unit`` gives metres per internal length unit.
    """

    mode: UnitMode = UnitMode.REDUCED
    length_unit: float = 1.0

    def __post_init__(self):
        if not (self.length_unit > 0 and math.isfinite(self.length_unit)):
            raise DomainError(f"length_unit must be positive, got {self.length_unit!r}")

    def _factor(self, quantity: str) -> float:
        try:
            power = _LENGTH_POWER[quantity]
        except KeyError:
            raise DomainError(f"unknown quantity {quantity!r}; expected one of {sorted(_LENGTH_POWER)}")
        if self.mode is UnitMode.REDUCED:
            return 1.0
        return HBAR_C / self.length_unit**power

    def to_si(self, value, quantity: str = "energy"):
        """Convert a reduced-unit value of ``quantity`` to SI."""
        return value * self._factor(quantity)

    def from_si(self, value, quantity: str = "energy"):
        """Inverse of :meth:`to_si`."""
        return value / self._factor(quantity)


def convert_energy(value, length_unit: float):
    """Energy in units of hbar*c/``length_unit`` -> joules."""
    if not length_unit > 0:
        raise DomainError(f"length_unit must be positive, got {length_unit!r}")
    return value * HBAR_C / length_unit


def convert_pressure(value, length_unit: float):
    """Pressure in units of hbar*c/``length_unit``**4 -> pascals."""
    return UnitSystem(UnitMode.SI, length_unit).to_si(value, "pressure")
