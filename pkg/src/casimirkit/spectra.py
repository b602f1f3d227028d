"""Field spectra, velocity drag on two-level atoms, Unruh temperature and the
vacuum energy estimate.

Everything here is in SI units: omega in rad/s, rho in J s / m^3.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .constants import C, E_CHARGE, HBAR, K_B
from .errors import DomainError

VACUUM_PREFACTOR = HBAR / (2.0 * math.pi**2 * C**3)
#: Observed dark-energy density, 4 eV per cubic millimetre, in J/m^3.
OBSERVED_ENERGY_DENSITY = 4.0 * E_CHARGE / 1e-9
NONRELATIVISTIC_LIMIT = 0.01


@dataclass(frozen=True)
class Vacuum:
    """Zero-point spectrum hbar w^3 / (2 pi^2 c^3)."""

    kind = "vacuum"


@dataclass(frozen=True)
class ScaledVacuum:
    factor: float

    kind = "scaled_vacuum"

    def __post_init__(self):
        if not self.factor >= 0:
            raise DomainError("spectral scale factor must be non-negative")


@dataclass(frozen=True)
class Planck:
    """Thermal part of the blackbody spectrum at ``temperature`` (K)."""

    temperature: float

    kind = "planck"

    def __post_init__(self):
        if not self.temperature >= 0:
            raise DomainError("temperature must be non-negative")


@dataclass(frozen=True)
class Tabulated:
    """Spectrum sampled on a strictly increasing omega grid, cubic-spline interpolated."""

    omega: tuple
    rho: tuple
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    kind = "tabulated"

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        r = np.asarray(self.rho, dtype=float)
        if w.ndim != 1 or w.shape != r.shape or len(w) < 4:
            raise DomainError("tabulated spectra need matching omega and rho arrays of length >= 4")
        if np.any(np.diff(w) <= 0):
            raise DomainError("omega grid must be strictly increasing")
        if np.any(w < 0) or np.any(r < 0):
            raise DomainError("omega and rho must be non-negative")
        object.__setattr__(self, "omega", tuple(w.tolist()))
        object.__setattr__(self, "rho", tuple(r.tolist()))
        object.__setattr__(self, "_spline", CubicSpline(w, r))

    @classmethod
    def from_csv(cls, path) -> "Tabulated":
        """Two columns: omega (rad/s), rho (J s/m^3).  A non-numeric header row is skipped."""
        rows = []
        with Path(path).open(newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except (ValueError, IndexError):
                    if rows:
                        raise DomainError(f"malformed spectrum row {row!r} in {path}")
        if not rows:
            raise DomainError(f"no spectrum rows in {path}")
        w, r = zip(*rows)
        return cls(w, r)


SpectralDensity = Vacuum | ScaledVacuum | Planck | Tabulated


def _planck_x(omega, temperature):
    return HBAR * omega / (K_B * temperature)


def eval_spectral(sd, omega: float) -> tuple[float, float]:
    """(rho(omega), d rho / d omega)."""
    if not omega > 0:
        raise DomainError("angular frequency must be positive")
    if isinstance(sd, (Vacuum, ScaledVacuum)):
        f = 1.0 if isinstance(sd, Vacuum) else sd.factor
        rho = f * VACUUM_PREFACTOR * omega**3
        return rho, 3.0 * rho / omega
    if isinstance(sd, Planck):
        if sd.temperature == 0:
            return 0.0, 0.0
        x = _planck_x(omega, sd.temperature)
        if x > 700:
            return 0.0, 0.0
        em1 = math.expm1(x)
        rho = 2.0 * VACUUM_PREFACTOR * omega**3 / em1
        # d/dw [w^3/(e^x - 1)] with x = hbar w / kT
        drho = rho / omega * (3.0 - x * math.exp(x) / em1)
        return rho, drho
    if isinstance(sd, Tabulated):
        if not sd.omega[0] <= omega <= sd.omega[-1]:
            raise DomainError(f"omega {omega:g} outside the tabulated grid [{sd.omega[0]:g}, {sd.omega[-1]:g}]")
        return float(sd._spline(omega)), float(sd._spline(omega, 1))
    raise DomainError(f"unknown spectral density {sd!r}")


def drag_factor(sd, omega: float) -> float:
    """rho - (omega/3) rho', evaluated so that Lorentz-invariant spectra give exactly 0."""
    if isinstance(sd, (Vacuum, ScaledVacuum)):
        if not omega > 0:
            raise DomainError("angular frequency must be positive")
        return 0.0
    if isinstance(sd, Planck):
        if not omega > 0:
            raise DomainError("angular frequency must be positive")
        if sd.temperature == 0:
            return 0.0
        x = _planck_x(omega, sd.temperature)
        if x > 700:
            return 0.0
        # the omega^3 part cancels; what remains is (2 w^3 pref / 3) x e^x / (e^x - 1)^2
        em1 = math.expm1(x)
        return 2.0 * VACUUM_PREFACTOR * omega**3 / 3.0 * x * (math.exp(x) / em1) / em1
    rho, drho = eval_spectral(sd, omega)
    return rho - omega / 3.0 * drho


@dataclass(frozen=True)
class TwoLevelAtom:
    omega: float
    b12: float
    p1: float
    p2: float

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError("transition frequency must be positive")
        if not self.b12 >= 0:
            raise DomainError("absorption coefficient must be non-negative")
        if not (0 <= self.p1 <= 1 and 0 <= self.p2 <= 1 and abs(self.p1 + self.p2 - 1) < 1e-12):
            raise DomainError("populations must lie in [0, 1] and sum to 1")

    @classmethod
    def thermal(cls, omega: float, b12: float, temperature: float) -> "TwoLevelAtom":
        """Nondegenerate levels in equilibrium: p2/p1 = exp(-hbar w / kT)."""
        if not temperature >= 0:
            raise DomainError("temperature must be non-negative")
        if temperature == 0:
            return cls(omega, b12, 1.0, 0.0)
        boltz = math.exp(-_planck_x(omega, temperature))
        p1 = 1.0 / (1.0 + boltz)
        return cls(omega, b12, p1, 1.0 - p1)


def drag_force(atom: TwoLevelAtom, sd, v):
    """Velocity drag on a two-level atom moving through spectrum ``sd``.

    F = -(hbar w / c^2) (p1 - p2) B12 [rho - (w/3) rho'] v.  ``v`` may be a
    scalar or a vector (m/s).
    """
    v_arr = np.asarray(v, dtype=float)
    speed = float(np.linalg.norm(v_arr))
    if speed > NONRELATIVISTIC_LIMIT * C:
        warnings.warn(f"|v| = {speed:.3g} m/s exceeds 0.01 c; the drag formula is nonrelativistic", RuntimeWarning, stacklevel=2)
    coeff = -(HBAR * atom.omega / C**2) * (atom.p1 - atom.p2) * atom.b12 * drag_factor(sd, atom.omega)
    # + 0.0 turns the -0.0 of a vanishing factor into 0.0
    out = coeff * v_arr + 0.0
    return float(out) if out.ndim == 0 else out


def unruh_temperature(acceleration: float) -> float:
    """T = hbar a / (2 pi k c), in K for a in m/s^2."""
    if not acceleration > 0:
        raise DomainError("acceleration must be positive")
    return HBAR * acceleration / (2.0 * math.pi * K_B * C)


def unruh_acceleration(temperature: float) -> float:
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    return 2.0 * math.pi * K_B * C * temperature / HBAR


@dataclass(frozen=True)
class VacuumBudget:
    cutoff_length: float  # m
    cutoff_omega: float  # rad/s
    energy_density: float  # J/m^3
    mass_density: float  # g/cm^3
    observed_energy_density: float
    observed_mass_density: float
    orders_of_magnitude_gap: float

    def to_dict(self):
        return dict(self.__dict__)


def _g_per_cm3(energy_density):
    # J/m^3 -> kg/m^3 -> g/cm^3
    return energy_density / C**2 * 1e-3


def vacuum_energy_budget(cutoff_length: float) -> VacuumBudget:
    """Zero-point energy up to omega_c = 2 pi c / cutoff_length, against the observed density."""
    if not cutoff_length > 0:
        raise DomainError("cutoff length must be positive")
    wc = 2.0 * math.pi * C / cutoff_length
    rho = HBAR * wc**4 / (8.0 * math.pi**2 * C**3)
    return VacuumBudget(
        cutoff_length,
        wc,
        rho,
        _g_per_cm3(rho),
        OBSERVED_ENERGY_DENSITY,
        _g_per_cm3(OBSERVED_ENERGY_DENSITY),
        math.log10(rho / OBSERVED_ENERGY_DENSITY),
    )


def spectral_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "vacuum":
        return Vacuum()
    if kind == "scaled_vacuum":
        return ScaledVacuum(float(d["factor"]))
    if kind == "planck":
        return Planck(float(d["temperature"]))
    if kind == "tabulated":
        return Tabulated(d["omega"], d["rho"])
    raise DomainError(f"unknown spectrum kind {kind!r}")
