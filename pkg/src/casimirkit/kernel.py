"""Retarded van der Waals pair kernel, material model and exact references.

All functions work in reduced units (hbar = c = 1).  Polarizabilities are
volumes, number densities are inverse volumes, so ``N*alpha`` is
dimensionless.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

#: Dielectric constant of a perfect conductor.  Always compared with
#: ``math.isinf``; never replaced by a large finite number.
PERFECT_CONDUCTOR = math.inf

#: Coefficient of the retarded pair potential, V(r) = -VDW_COEFF * a1*a2 / r**7.
VDW_COEFF = 23.0 / (4.0 * math.pi)

#: Upper bound of N*alpha reached as epsilon -> infinity.
N_ALPHA_MAX = 3.0 / (4.0 * math.pi)


def _require_positive(name, value):
    if not value > 0:
        raise DomainError(f"{name} must be positive, got {value!r}")


def retarded_vdw(r, alpha, alpha_other=None):
    """Retarded (Casimir-Polder) pair energy of two atoms at distance ``r``.

    ``alpha_other`` defaults to ``alpha`` (identical atoms).  Accepts scalars
    or arrays for ``r``.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(~(r_arr > 0)):
        raise DomainError("pair separation must be positive; the kernel is singular at r = 0")
    a2 = alpha if alpha_other is None else alpha_other
    out = -VDW_COEFF * alpha * a2 / r_arr**7
    return float(out) if out.ndim == 0 else out


def n_alpha_from_epsilon(epsilon: float) -> float:
    """Clausius-Mossotti: N*alpha = (3/4pi)(eps-1)/(eps+2)."""
    if math.isinf(epsilon) and epsilon > 0:
        return N_ALPHA_MAX
    if not epsilon >= 1:
        raise DomainError(f"dielectric constant must be >= 1, got {epsilon!r}")
    return N_ALPHA_MAX * (epsilon - 1.0) / (epsilon + 2.0)


def cm_factor(epsilon: float) -> float:
    """(eps-1)/(eps+2), equal to 1 for a perfect conductor."""
    return n_alpha_from_epsilon(epsilon) / N_ALPHA_MAX


@dataclass(frozen=True)
class Material:
    """Homogeneous medium of identical atoms.

    Parameters
    ----------
    alpha : float
        Static polarizability (length**3).
    number_density : float
        Atoms per unit volume.
    epsilon : float, optional
        Dielectric constant.  When given, it must agree with ``alpha`` and
        ``number_density`` through the Clausius-Mossotti relation; use
        :meth:`from_epsilon` to build a consistent instance.
    """

    alpha: float
    number_density: float
    epsilon: float | None = None

    def __post_init__(self):
        if not self.alpha >= 0 or not self.number_density >= 0:
            raise DomainError("alpha and number_density must be non-negative")
        if self.epsilon is not None:
            expected = n_alpha_from_epsilon(self.epsilon)
            got = self.n_alpha
            if not math.isclose(got, expected, rel_tol=1e-12, abs_tol=1e-300):
                raise DomainError(
                    f"N*alpha = {got!r} is inconsistent with epsilon = {self.epsilon!r} "
                    f"(Clausius-Mossotti gives {expected!r})"
                )

    @classmethod
    def from_epsilon(cls, epsilon: float, alpha: float = 1.0) -> "Material":
        if epsilon == 1:
            return cls(alpha=alpha, number_density=0.0, epsilon=epsilon)
        _require_positive("alpha", alpha)
        return cls(alpha=alpha, number_density=n_alpha_from_epsilon(epsilon) / alpha, epsilon=epsilon)

    @classmethod
    def perfect_conductor(cls, alpha: float = 1.0) -> "Material":
        return cls.from_epsilon(PERFECT_CONDUCTOR, alpha)

    @property
    def n_alpha(self) -> float:
        return self.number_density * self.alpha

    def to_dict(self):
        eps = self.epsilon
        if eps is not None and math.isinf(eps):
            eps = "inf"
        return {"alpha": self.alpha, "number_density": self.number_density, "epsilon": eps}


def casimir_polder_potential(d, alpha):
    """Atom / perfect-mirror potential at large distance, -3 alpha / (8 pi d^4)."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(~(d_arr > 0)):
        raise DomainError("atom-wall distance must be positive")
    out = -3.0 * alpha / (8.0 * math.pi * d_arr**4)
    return float(out) if out.ndim == 0 else out


def casimir_plate_pressure(d):
    """Force per unit area between perfect plates, -pi^2 / (240 d^4)."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(~(d_arr > 0)):
        raise DomainError("plate gap must be positive")
    out = -math.pi**2 / (240.0 * d_arr**4)
    return float(out) if out.ndim == 0 else out


def gradient_force(
    profile: Callable,
    alpha: float,
    x,
    mode: str = "potential",
    step: float = 1e-5,
):
    """Force on a polarizable particle from a scalar profile.

    ``mode="potential"``: ``profile`` is the particle's potential energy V(x)
    and the force is -grad V.  ``mode="field_square"``: ``profile`` is the
    mean squared field <E(x)^2> and the force is +alpha/2 * grad <E^2>.

    Derivatives are central differences with step ``step`` times the local
    length scale max(|x|, 1).  Scalar ``x`` gives a scalar force.
    """
    if mode not in ("potential", "field_square"):
        raise DomainError(f"unknown mode {mode!r}")
    if not step > 0:
        raise DomainError("finite-difference step must be positive")
    scalar = np.ndim(x) == 0
    x0 = np.atleast_1d(np.asarray(x, dtype=float))
    h = step * max(float(np.linalg.norm(x0)), 1.0)

    def ev(pt):
        try:
            val = profile(pt[0] if scalar else pt)
        except DomainError:
            raise
        except (ValueError, ZeroDivisionError, FloatingPointError) as exc:
            raise DomainError(f"profile cannot be evaluated at {pt}: {exc}") from exc
        val = float(val)
        if not math.isfinite(val):
            raise DomainError(f"profile is not finite at {pt}")
        return val

    grad = np.empty_like(x0)
    for i in range(x0.size):
        e = np.zeros_like(x0)
        e[i] = h
        grad[i] = (ev(x0 + e) - ev(x0 - e)) / (2.0 * h)
    force = -grad if mode == "potential" else 0.5 * alpha * grad
    return float(force[0]) if scalar else force
