"""Pairwise interaction energies.

``self_energy_with_cutoff`` integrates the pair-distance density against the
retarded kernel with hard-core exclusion of pairs closer than ``s``.
``interaction_energy_disjoint`` evaluates the convergent double sum between
two separated bodies by numerical quadrature.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from ..errors import CapabilityError, DomainError
from ..kernel import VDW_COEFF, Material
from .bodies import Ball, Body, Cube, Cylinder, FiniteBody, HalfSpace, PointAtom, Slab
from .pairdensity import Method, PairDistanceDensity, pair_distance_density

#: Integral over z of (rho^2 + z^2)^(-7/2), in units of rho^-6.
AXIAL_FACTOR = 16.0 / 15.0


def kernel_prefactor(dim: int, material: Material):
    """(prefactor, power) with pair energy = prefactor / r**power.

    ``dim == 2`` is the axially integrated kernel of an infinite cylinder.
    """
    base = -VDW_COEFF * material.alpha**2
    if dim == 3:
        return base, 7
    if dim == 2:
        return base * AXIAL_FACTOR, 6
    raise DomainError(f"unsupported pair dimension {dim}")


def self_energy_response(density: PairDistanceDensity, material: Material, s):
    """Per-piece matrices mapping density coefficients to E(s).

    E(s) = sum over pieces of ``R_piece @ coefficients``; used both for the
    energy itself and for propagating coefficient covariances.
    """
    pref, p = kernel_prefactor(density.dim, material)
    scale = 0.5 * material.number_density**2 * pref
    return [scale * piece.response(s, p) for piece in density.pieces]


def self_energy_with_cutoff(
    body: FiniteBody,
    material: Material,
    s,
    density: PairDistanceDensity | None = None,
    **density_kwargs,
):
    """Pairwise self-energy with all pairs closer than ``s`` removed.

    E(s) = 1/2 N^2 * integral_s^diam P(r) V(r) dr.  For the cylinder this
    is the energy per unit length.  ``density`` defaults to the analytic
    density where one exists and the grid density otherwise; extra keyword
    arguments go to :func:`pair_distance_density`.
    """
    if not isinstance(body, FiniteBody):
        raise CapabilityError(f"self-energy needs a finite body, got {type(body).__name__}")
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(~(s_arr > 0)) or np.any(s_arr >= 0.5 * body.diameter):
        raise DomainError(f"cutoff must lie in (0, {0.5 * body.diameter:g})")
    if density is None:
        method = Method.ANALYTIC if isinstance(body, (Ball, Cylinder)) else Method.GRID
        density_kwargs.setdefault("method", method)
        density = pair_distance_density(body, **density_kwargs)
    if density.dim != body.dim:
        raise DomainError("density dimension does not match the body")
    energy = sum(R @ np.asarray(piece.coefficients) for R, piece in zip(
        self_energy_response(density, material, s_arr), density.pieces))
    return energy if np.ndim(s) else float(energy[0])


# ---------------------------------------------------------------------------
# disjoint bodies

_QUAD = dict(epsabs=0.0, epsrel=1e-11, limit=200)


def _unit_lateral_integral():
    val, _ = integrate.quad(lambda u: 2.0 * math.pi * u * (1.0 + u * u) ** -3.5, 0.0, math.inf, **_QUAD)
    return val


#: Integral over the plane z = 1 of |r|^-7 (2 pi / 5), by quadrature.
_UNIT_LATERAL = _unit_lateral_integral()


def _lateral_kernel(z):
    """Integral over the plane at height z of |r|^-7; scales as z^-5."""
    return _UNIT_LATERAL / z**5


def _overlap_weight(r1, r2, z):
    """Length of {z1 in r1 : z1 + z in r2}."""
    lo = max(r1[0], r2[0] - z)
    hi = min(r1[1], r2[1] - z)
    return max(hi - lo, 0.0)


def _planar_pair(ba, bb, material):
    ra, rb = ba.z_range(), bb.z_range()
    if ra[1] <= rb[0]:
        lo_range, hi_range = ra, rb
    elif rb[1] <= ra[0]:
        lo_range, hi_range = rb, ra
    else:
        raise DomainError("planar bodies overlap")
    gap = hi_range[0] - lo_range[1]
    if not gap > 0:
        raise DomainError("planar bodies touch; separation must be positive")
    n = material.number_density
    if n == 0 or material.alpha == 0:
        return 0.0
    zmax = hi_range[1] - lo_range[0]
    kinks = sorted({gap, hi_range[0] - lo_range[0], hi_range[1] - lo_range[1], zmax} - {math.inf})
    kinks = [k for k in kinks if math.isfinite(k) and k >= gap]

    def f(z):
        return _overlap_weight(lo_range, hi_range, z) * _lateral_kernel(z)

    total = 0.0
    edges = kinks + ([math.inf] if not math.isfinite(zmax) else [])
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(f, a, b, **_QUAD)
        total += val
    return -VDW_COEFF * material.alpha**2 * n * n * total


def _atom_planar(atom, slab, material):
    z0 = atom.position[2]
    lo, hi = slab.z_range()
    if lo < z0 < hi:
        raise DomainError("atom lies inside the body")
    if z0 in (lo, hi):
        raise DomainError("atom touches the body; separation must be positive")
    # distances along z from the atom to the near and far faces
    near, far = (lo - z0, hi - z0) if z0 < lo else (z0 - hi, z0 - lo)
    val, _ = integrate.quad(_lateral_kernel, near, far, **_QUAD)
    return -VDW_COEFF * atom.alpha * material.alpha * material.number_density * val


def _atom_ball(atom, ball, material):
    rel = np.array(atom.position) - np.array(ball.center)
    dist = float(np.linalg.norm(rel))
    a = ball.radius
    if dist <= a:
        raise DomainError("atom lies inside or on the ball")
    # cylindrical coordinates about the line through the atom and the centre
    def inner(z):
        rmax = math.sqrt(max(a * a - z * z, 0.0))
        dz = dist - z
        return integrate.quad(lambda rho: 2.0 * math.pi * rho * (rho * rho + dz * dz) ** -3.5, 0.0, rmax, **_QUAD)[0]

    val, _ = integrate.quad(inner, -a, a, **_QUAD)
    return -VDW_COEFF * atom.alpha * material.alpha * material.number_density * val


def _atom_cube(atom, cube, material):
    rot = np.eye(3) if cube.rotation is None else np.asarray(cube.rotation)
    local = (np.array(atom.position) - np.array(cube.center)) @ rot
    h = 0.5 * cube.side
    if np.all(np.abs(local) <= h):
        raise DomainError("atom lies inside or on the cube")
    opts = dict(epsabs=0.0, epsrel=1e-9, limit=100)

    def f(x, y, z):
        d2 = (x - local[0]) ** 2 + (y - local[1]) ** 2 + (z - local[2]) ** 2
        return d2 ** -3.5

    val, _ = integrate.nquad(f, [(-h, h)] * 3, opts=[opts] * 3)
    return -VDW_COEFF * atom.alpha * material.alpha * material.number_density * val


def interaction_energy_disjoint(body_a: Body, body_b: Body, material: Material) -> float:
    """Pairwise retarded interaction between two separated bodies.

    Planar pairs (half-spaces, slabs) return energy per unit area.  A point
    atom contributes its own polarizability; extended bodies are made of
    ``material``.
    """
    a, b = body_a, body_b
    if isinstance(b, PointAtom) and not isinstance(a, PointAtom):
        a, b = b, a
    if isinstance(a, PointAtom):
        if isinstance(b, PointAtom):
            r = float(np.linalg.norm(np.subtract(a.position, b.position)))
            if not r > 0:
                raise DomainError("atoms coincide")
            return -VDW_COEFF * a.alpha * b.alpha / r**7
        if material.number_density == 0:
            return 0.0
        if isinstance(b, (HalfSpace, Slab)):
            return _atom_planar(a, b, material)
        if isinstance(b, Ball):
            return _atom_ball(a, b, material)
        if isinstance(b, Cube):
            return _atom_cube(a, b, material)
    elif isinstance(a, (HalfSpace, Slab)) and isinstance(b, (HalfSpace, Slab)):
        return _planar_pair(a, b, material)
    raise CapabilityError(f"no quadrature for the pair ({type(body_a).__name__}, {type(body_b).__name__})")


def planar_pressure(energy_per_area, d, rel_step=1e-4):
    """Force per area -dE/dd from an energy-per-area function of the gap."""
    h = rel_step * d
    return -(energy_per_area(d + h) - energy_per_area(d - h)) / (2.0 * h)
