"""Cutoff-series fits and the pure Casimir term.

A pairwise self-energy with hard-core cutoff ``s`` behaves for small ``s`` as

    E(s) = b4/s^4 + b3/s^3 + b2/s^2 + b1/s + blog*ln(1/s) + b0 + (regular terms)

The divergent terms are volume, surface, edge and corner contributions; the
constant ``b0`` is the cutoff-independent "pure" term.  A pair-density term
r**k maps onto s**(k - p + 1) (p = 7 for bodies, 6 for the axially reduced
cylinder), so the set of terms a body needs follows from its small-r
structure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import DomainError, FitError
from .geometry.bodies import Ball, Cube, Cylinder, FiniteBody
from .geometry.energy import self_energy_response, self_energy_with_cutoff
from .geometry.pairdensity import Method, PairDistanceDensity, pair_distance_density
from .kernel import Material

# term name -> exponent of s (``None`` marks ln(1/s))
TERMS = {
    "s^-4": -4,
    "s^-3": -3,
    "s^-2": -2,
    "s^-1": -1,
    "log": None,
    "s^1": 1,
    "s^3": 3,
}
FULL_BASIS = ("s^-4", "s^-3", "s^-2", "s^-1", "log")
BALL_BASIS = ("s^-4", "s^-3", "s^-1")
CUBE_BASIS = FULL_BASIS
# the disk covariance carries r^5 and r^7 terms, which show up as s and s^3
CYLINDER_BASIS = ("s^-4", "s^-3", "s^-1", "s^1", "s^3")

PRECONDITION_POWER = 4


def default_basis(body: FiniteBody) -> tuple:
    if isinstance(body, Ball):
        return BALL_BASIS
    if isinstance(body, Cube):
        return CUBE_BASIS
    if isinstance(body, Cylinder):
        return CYLINDER_BASIS
    return FULL_BASIS


def _column(term, s):
    e = TERMS[term]
    return np.log(1.0 / s) if e is None else s**e


@dataclass
class CutoffExpansion:
    """Fitted cutoff series.

    ``coefficients`` maps term names (plus ``"const"``) to values; ``b0`` is
    the constant and ``b0_uncertainty`` its jackknife error.
    """

    coefficients: dict
    b0: float
    b0_uncertainty: float
    fit_residual: float
    condition_number: float
    s_grid: list
    basis: tuple

    def predict(self, s):
        s = np.asarray(s, dtype=float)
        out = np.full(s.shape, self.b0)
        for term in self.basis:
            out = out + self.coefficients[term] * _column(term, s)
        return out

    def to_dict(self):
        d = asdict(self)
        d["basis"] = list(self.basis)
        return d


def _design(s, basis):
    cols = [_column(t, s) for t in basis] + [np.ones_like(s)]
    # fit E(s) * s^4 rather than E(s): raw values span many decades
    return np.stack(cols, axis=1) * (s**PRECONDITION_POWER)[:, None]


def _solve(A, y, max_condition):
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise FitError("a basis column vanishes on the cutoff grid", {"norms": norms.tolist()})
    An = A / norms
    u, sv, vt = np.linalg.svd(An, full_matrices=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    if not cond <= max_condition:
        raise FitError(
            f"cutoff fit is ill-conditioned (condition number {cond:.3g} > {max_condition:.3g})",
            {"condition_number": cond, "rank": int(np.sum(sv > sv[0] * 1e-14))},
        )
    coef = (vt.T @ ((u.T @ y) / sv)) / norms
    return coef, cond


def const_weights(s, basis, max_condition=1e12):
    """Row vector w with b0 = w @ E(s) for the least-squares fit on ``s``."""
    s = np.asarray(s, dtype=float)
    A = _design(s, basis)
    norms = np.linalg.norm(A, axis=0)
    pinv = np.linalg.pinv(A / norms)
    return (pinv[-1] / norms[-1]) * s**PRECONDITION_POWER


def extract_pure_term(samples, basis=FULL_BASIS, *, tolerance=1e-6, max_condition=1e12) -> CutoffExpansion:
    """Least-squares fit of E(s) samples to the cutoff series.

    Parameters
    ----------
    samples : sequence of (s, E) pairs
    basis : sequence of term names from ``TERMS``; the constant is always fitted
    tolerance : maximum relative residual ||fit - data|| / ||data|| (on E s^4)
    max_condition : largest acceptable condition number of the column-scaled
        design matrix
    """
    basis = tuple(basis)
    unknown = [t for t in basis if t not in TERMS]
    if unknown:
        raise DomainError(f"unknown basis terms {unknown}; choose from {list(TERMS)}")
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("samples must be a sequence of (s, E) pairs")
    s, e = arr[:, 0], arr[:, 1]
    n_terms = len(basis) + 1
    if len(s) < 2 * n_terms:
        raise DomainError(f"need at least {2 * n_terms} samples for {n_terms} terms, got {len(s)}")
    if np.any(s <= 0):
        raise DomainError("cutoff values must be positive")
    if s.max() / s.min() < 10.0 * (1 - 1e-9):
        raise DomainError("cutoff samples must span at least one decade")

    A = _design(s, basis)
    y = e * s**PRECONDITION_POWER
    coef, cond = _solve(A, y, max_condition)
    resid = float(np.linalg.norm(A @ coef - y) / np.linalg.norm(y)) if np.any(y) else 0.0
    if not resid <= tolerance:
        raise FitError(
            f"cutoff series does not describe the data (relative residual {resid:.3g} > {tolerance:.3g})",
            {"fit_residual": resid, "condition_number": cond},
        )

    # jackknife over samples
    n = len(s)
    loo = np.empty(n)
    for i in range(n):
        keep = np.arange(n) != i
        loo[i] = _solve(A[keep], y[keep], math.inf)[0][-1]
    jack = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))

    coefficients = {t: float(c) for t, c in zip(basis, coef[:-1])}
    coefficients["const"] = float(coef[-1])
    return CutoffExpansion(coefficients, float(coef[-1]), jack, resid, cond, s.tolist(), basis)


# ---------------------------------------------------------------------------
# literature values and the comparison report

#: Exact results for perfect conductors, in hbar c / a (per unit length and
#: hbar c / a^2 for the cylinder).  ``value`` is None where only the sign is known.
EXACT_VALUES = {
    "ball": {"value": 0.09, "sign": 1, "source": "perfectly conducting spherical shell"},
    "cube": {
        "value": 0.092,
        "sign": 1,
        "source": "perfectly conducting cube; quoted without units, taken as hbar c / a",
    },
    "cylinder": {"value": None, "sign": -1, "source": "infinite conducting cylindrical shell (sign only)"},
}

CYLINDER_ZERO_THRESHOLD = 0.002


@dataclass
class PureTermConfig:
    method: str = "grid"
    resolution: int = 256
    samples: int = 10_000_000
    seed: int | None = None
    s_min: float = 0.02
    s_max: float = 0.3
    n_s: int = 24
    basis: tuple | None = None
    tolerance: float = 1e-6
    max_condition: float = 1e12
    workers: int = 1
    check_resolution: bool = False
    cache_dir: str | None = None

    def to_dict(self):
        d = asdict(self)
        d.pop("workers")
        d["basis"] = None if self.basis is None else list(self.basis)
        return d


@dataclass
class PureTermRow:
    geometry: str
    size: float
    material: dict
    expansion: CutoffExpansion
    b0: float
    uncertainty_jackknife: float
    uncertainty_density: float
    uncertainty: float
    exact_value: float | None
    exact_sign: int
    pairwise_sign: int
    sign_agreement: bool
    same_order: bool | None
    provenance: dict
    energies: list = field(default_factory=list)
    convergence: dict | None = None
    notes: list = field(default_factory=list)

    def to_dict(self):
        d = asdict(self)
        d["expansion"] = self.expansion.to_dict()
        return d


def cutoff_grid(body: FiniteBody, s_min=0.02, s_max=0.3, n_s=24):
    if not 0 < s_min < s_max:
        raise DomainError("need 0 < s_min < s_max")
    a = body.size
    return a * np.geomspace(s_min, s_max, n_s)


def density_uncertainty(density, material, s, basis, max_condition=1e12):
    """Standard deviation of b0 propagated from the density-fit covariances."""
    w = const_weights(s, basis, max_condition)
    var = 0.0
    for R, piece in zip(self_energy_response(density, material, s), density.pieces):
        g = w @ R
        var += float(g @ piece.cov_matrix() @ g)
    return math.sqrt(max(var, 0.0))


def _density_for(body, cfg, resolution):
    return pair_distance_density(
        body,
        cfg.method,
        resolution,
        cfg.seed,
        samples=cfg.samples,
        workers=cfg.workers,
        cache_dir=cfg.cache_dir,
    )


def pure_term(body, material, cfg, density=None, resolution=None):
    """Run P(r) -> E(s) -> fit once; returns (expansion, density, s_grid, energies, basis)."""
    if density is None:
        density = _density_for(body, cfg, cfg.resolution if resolution is None else resolution)
    s = cutoff_grid(body, cfg.s_min, cfg.s_max, cfg.n_s)
    if s[-1] >= density.pieces[0].hi:
        raise DomainError("the cutoff window must lie inside the first piece of the pair density")
    energies = self_energy_with_cutoff(body, material, s, density=density)
    basis = tuple(cfg.basis) if cfg.basis is not None else default_basis(body)
    exp = extract_pure_term(
        np.column_stack([s, energies]), basis, tolerance=cfg.tolerance, max_condition=cfg.max_condition
    )
    return exp, density, s, energies, basis


def _sign_of(body, b0, uncertainty):
    if isinstance(body, Cylinder):
        # "zero" is only assertable as smallness in units of hbar c / a^2
        if abs(b0) < CYLINDER_ZERO_THRESHOLD / body.size**2:
            return 0
    return (b0 > 0) - (b0 < 0)


def pure_term_report(body: FiniteBody, material: Material, config: PureTermConfig | None = None) -> PureTermRow:
    """Pairwise pure term of a ball, cube or cylinder next to the exact result."""
    cfg = config or PureTermConfig()
    if not isinstance(body, (Ball, Cube, Cylinder)):
        raise DomainError("pure-term reports cover ball, cube and cylinder only")
    exp, density, s, energies, basis = pure_term(body, material, cfg)
    sig_d = density_uncertainty(density, material, s, basis, cfg.max_condition)
    sigma = math.hypot(exp.b0_uncertainty, sig_d)
    exact = EXACT_VALUES[body.kind]
    pw_sign = _sign_of(body, exp.b0, sigma)
    # exact values scale as 1/a (1/a^2 per length for the cylinder)
    scale = body.size ** (-2 if isinstance(body, Cylinder) else -1)
    exact_value = None if exact["value"] is None else exact["value"] * scale
    same_order = None
    if exact_value is not None and exp.b0 != 0:
        same_order = bool(0.1 <= abs(exp.b0 / exact_value) <= 10.0)
    notes = [exact["source"]]
    convergence = None
    if cfg.check_resolution and cfg.method == Method.GRID.value:
        exp2, *_ = pure_term(body, material, cfg, resolution=2 * cfg.resolution)
        convergence = {
            "resolutions": [cfg.resolution, 2 * cfg.resolution],
            "b0": [exp.b0, exp2.b0],
            "sign_stable": (exp.b0 > 0) == (exp2.b0 > 0),
            "magnitude_decreasing": abs(exp2.b0) < abs(exp.b0),
        }
    return PureTermRow(
        geometry=body.kind,
        size=body.size,
        material=material.to_dict(),
        expansion=exp,
        b0=exp.b0,
        uncertainty_jackknife=exp.b0_uncertainty,
        uncertainty_density=sig_d,
        uncertainty=sigma,
        exact_value=exact_value,
        exact_sign=exact["sign"],
        pairwise_sign=pw_sign,
        sign_agreement=pw_sign == exact["sign"],
        same_order=same_order,
        provenance=density.provenance,
        energies=energies.tolist(),
        convergence=convergence,
        notes=notes,
    )
