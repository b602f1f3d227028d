"""Pair-distance densities of finite bodies.

The pair density P(r) of a body B is the measure of ordered point pairs
(x, y) in B x B with |x - y| = r, so that the integral of P over r is
measure(B)**2 and any isotropic pair sum reduces to a 1-D integral:

    sum over pairs of f(|x - y|)  =  integral P(r) f(r) dr.

It is related to the set covariance g(h) = |B intersect (B + h)| by
P(r) = S_D r^(D-1) gbar(r), where gbar is the mean of g over the sphere of
radius r and S_D its surface (4 pi in 3-D, 2 pi in 2-D).

P is stored piecewise.  Each piece is a sum of monomials r**k so that
integrals against r**-p have closed forms.  On the first piece the allowed
powers follow the body's small-r structure (no spurious terms), which keeps
the cutoff series of self-energies free of terms the body does not have.

Three constructions:

``analytic``     closed forms (ball exactly; disk cross-section of the
                 infinite cylinder fitted to its closed-form covariance)
``grid``         FFT autocorrelation of the voxelized indicator, averaged
                 over exact lattice spheres |k|^2 = m
``monte_carlo``  histogram of sampled point pairs
"""
from __future__ import annotations

import enum
import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.fft as sfft
from scipy.signal import fftconvolve

from ..errors import CapabilityError, DomainError
from .bodies import Ball, Body, Cylinder, FiniteBody, body_from_dict

SCHEMA_ID = "casimirkit.pair_density/1"
FIT_VERSION = 2
MC_CHUNK = 1 << 20
MIN_GRID_RESOLUTION = 32
MIN_MC_SAMPLES = 100_000


class Method(str, enum.Enum):
    ANALYTIC = "analytic"
    GRID = "grid"
    MONTE_CARLO = "monte_carlo"


def _sphere_surface(dim):
    return 4.0 * math.pi if dim == 3 else 2.0 * math.pi


def power_integral(x0, x1, q):
    """Integral of r**q from x0 to x1 (elementwise, x0 <= x1)."""
    if q == -1:
        return np.log(x1 / x0)
    return (x1 ** (q + 1) - x0 ** (q + 1)) / (q + 1)


@dataclass(frozen=True)
class Piece:
    """P(r) = sum_k c_k r**k on [lo, hi]."""

    lo: float
    hi: float
    powers: tuple
    coefficients: tuple
    covariance: tuple | None = None

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return sum(c * r**k for k, c in zip(self.powers, self.coefficients))

    def response(self, s, p):
        """Matrix R[i, j] = integral over [max(s_i, lo), hi] of r**(k_j - p)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        x0 = np.maximum(s, self.lo)
        out = np.zeros((s.size, len(self.powers)))
        active = x0 < self.hi
        if self.lo == 0.0 and np.any(active & (x0 <= 0)):
            raise DomainError("integral against r**-p needs a positive lower limit")
        for j, k in enumerate(self.powers):
            out[active, j] = power_integral(x0[active], self.hi, k - p)
        return out

    def cov_matrix(self):
        n = len(self.powers)
        if self.covariance is None:
            return np.zeros((n, n))
        return np.asarray(self.covariance, dtype=float)

    def to_dict(self):
        return {
            "lo": self.lo,
            "hi": self.hi,
            "powers": list(self.powers),
            "coefficients": list(self.coefficients),
            "covariance": None if self.covariance is None else [list(r) for r in self.covariance],
        }

    @classmethod
    def from_dict(cls, d):
        cov = d.get("covariance")
        return cls(
            float(d["lo"]),
            float(d["hi"]),
            tuple(int(k) for k in d["powers"]),
            tuple(float(c) for c in d["coefficients"]),
            None if cov is None else tuple(tuple(float(x) for x in row) for row in cov),
        )


@dataclass(frozen=True)
class PairDistanceDensity:
    dim: int
    pieces: tuple
    total_measure: float
    provenance: dict = field(default_factory=dict)
    body: dict = field(default_factory=dict)

    @property
    def breakpoints(self):
        return tuple([self.pieces[0].lo] + [p.hi for p in self.pieces])

    @property
    def support(self):
        return self.pieces[0].lo, self.pieces[-1].hi

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for i, piece in enumerate(self.pieces):
            last = i == len(self.pieces) - 1
            mask = (r >= piece.lo) & ((r <= piece.hi) if last else (r < piece.hi))
            out = np.where(mask, piece(r), out)
        return out

    def integral(self, lo=None, hi=None):
        """Integral of P over [lo, hi] (defaults: the support)."""
        lo = self.support[0] if lo is None else lo
        hi = self.support[1] if hi is None else hi
        total = 0.0
        for piece in self.pieces:
            a, b = max(lo, piece.lo), min(hi, piece.hi)
            if b > a:
                total += sum(c * power_integral(a, b, k) for k, c in zip(piece.powers, piece.coefficients))
        return float(total)

    def bin_averages(self, edges):
        edges = np.asarray(edges, dtype=float)
        return np.array([self.integral(a, b) / (b - a) for a, b in zip(edges[:-1], edges[1:])])

    def kernel_integral(self, s, p):
        """Integral over [s, diameter] of P(r) r**-p, closed form per piece."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        total = np.zeros(s_arr.size)
        for piece in self.pieces:
            total += piece.response(s_arr, p) @ np.asarray(piece.coefficients)
        return total if np.ndim(s) else float(total[0])

    def to_dict(self):
        return {
            "schema": SCHEMA_ID,
            "dim": self.dim,
            "body": self.body,
            "provenance": self.provenance,
            "total_measure": self.total_measure,
            "breakpoints": list(self.breakpoints),
            "pieces": [p.to_dict() for p in self.pieces],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != SCHEMA_ID:
            raise DomainError(f"not a pair-density document (schema {d.get('schema')!r})")
        return cls(
            dim=int(d["dim"]),
            pieces=tuple(Piece.from_dict(p) for p in d["pieces"]),
            total_measure=float(d["total_measure"]),
            provenance=dict(d["provenance"]),
            body=dict(d["body"]),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# fitting


def _wlstsq(A, y, w, absolute_weights):
    sw = np.sqrt(w)
    Aw = A * sw[:, None]
    coef, *_ = np.linalg.lstsq(Aw, y * sw, rcond=None)
    resid = (A @ coef - y) * sw
    dof = max(len(y) - len(coef), 1)
    chi2 = float(resid @ resid) / dof
    # pinv keeps this finite when the normal matrix is nearly singular
    cov = np.linalg.pinv(Aw.T @ Aw)
    cov *= max(chi2, 1.0) if absolute_weights else chi2
    return coef, cov


def _to_piece(lo, hi, gpowers, coef, cov, dim):
    sd = _sphere_surface(dim)
    powers = tuple(int(j) + dim - 1 for j in gpowers)
    return Piece(
        float(lo),
        float(hi),
        powers,
        tuple(float(sd * c) for c in coef),
        tuple(tuple(float(sd * sd * x) for x in row) for row in cov),
    )


def _piece_powers(body, index):
    if index == 0:
        return tuple(body.small_r_powers)
    return tuple(range(body.tail_degree + 1))


def _renormalized(pieces, target):
    got = sum(
        sum(c * power_integral(p.lo, p.hi, k) for k, c in zip(p.powers, p.coefficients)) for p in pieces
    )
    scale = target / got
    return tuple(
        Piece(
            p.lo,
            p.hi,
            p.powers,
            tuple(scale * c for c in p.coefficients),
            None if p.covariance is None else tuple(tuple(scale * scale * x for x in row) for row in p.covariance),
        )
        for p in pieces
    )


@dataclass
class _PieceFit:
    """Covariance-space fit on one interval; ``fixed`` marks exactly known coefficients."""

    lo: float
    hi: float
    gpowers: tuple
    coef: np.ndarray
    cov: np.ndarray
    fixed: np.ndarray


def _pinned(body, gp, index, exact_field):
    """Exact small-r coefficients: g(0) = measure and the boundary slope.

    Only pinned when the sampled field is exactly the body (grid-aligned
    cubes).  A voxelized curved body has a slightly different measure and
    boundary, and forcing the true values onto its samples biases the fit.
    """
    known = {}
    if index == 0 and exact_field:
        known = dict(zip((0, 1), body.covariance_start()))
    return np.array([j in known for j in gp]), np.array([known.get(j, 0.0) for j in gp])


def _assemble(body, fits):
    """Scale the free coefficients so that the pair measure is exactly measure**2."""
    dim = body.dim
    sd = _sphere_surface(dim)
    fixed_part = free_part = 0.0
    for f in fits:
        w = np.array([sd * power_integral(f.lo, f.hi, j + dim - 1) for j in f.gpowers])
        fixed_part += float(w[f.fixed] @ f.coef[f.fixed])
        free_part += float(w[~f.fixed] @ f.coef[~f.fixed])
    scale = (body.measure**2 - fixed_part) / free_part
    pieces = []
    for f in fits:
        factor = np.where(f.fixed, 1.0, scale)
        pieces.append(_to_piece(f.lo, f.hi, f.gpowers, f.coef * factor, f.cov * np.outer(factor, factor), dim))
    return tuple(pieces)


def _fit_samples(body, r, gbar, weight, r_min, var):
    """Fit angular-mean covariance samples piece by piece."""
    dim = body.dim
    bps = body.breakpoints
    fits = []
    for i, (lo, hi) in enumerate(zip(bps[:-1], bps[1:])):
        sel = (r >= max(lo, r_min)) & (r <= hi)
        gp = _piece_powers(body, i)
        fixed, known = _pinned(body, gp, i, body.grid_aligned)
        if sel.sum() < 2 * len(gp):
            raise DomainError(f"too few samples on [{lo:g}, {hi:g}] to fit the pair density; raise the resolution")
        rr = r[sel]
        # the grid field is the indicator smoothed by the sub-voxel kernel, which
        # adds var * laplacian to the covariance; absorb that into the basis
        A = np.stack([rr**j + var * j * (j + dim - 2) * rr ** (j - 2.0) for j in gp], axis=1)
        y = gbar[sel] - A[:, fixed] @ known[fixed]
        coef, cov = known.copy(), np.zeros((len(gp), len(gp)))
        c_free, cov_free = _wlstsq(A[:, ~fixed], y, weight[sel], absolute_weights=False)
        coef[~fixed] = c_free
        cov[np.ix_(~fixed, ~fixed)] = cov_free
        fits.append(_PieceFit(lo, hi, gp, coef, cov, fixed))
    return _assemble(body, fits)


def _fit_histogram(body, edges, counts, n_pairs):
    dim = body.dim
    sd = _sphere_surface(dim)
    m2 = body.measure**2
    y_all = counts * (m2 / n_pairs)
    bps = body.breakpoints
    fits = []
    for i, (lo, hi) in enumerate(zip(bps[:-1], bps[1:])):
        sel = (edges[:-1] >= lo - 1e-12 * hi) & (edges[1:] <= hi + 1e-12 * hi)
        e0, e1 = edges[:-1][sel], edges[1:][sel]
        gp = _piece_powers(body, i)
        fixed, known = _pinned(body, gp, i, False)
        A = np.stack([sd * power_integral(e0, e1, j + dim - 1) for j in gp], axis=1)
        y = y_all[sel] - A[:, fixed] @ known[fixed]
        w = 1.0 / (np.maximum(counts[sel], 1.0) * (m2 / n_pairs) ** 2)
        coef, cov = known.copy(), np.zeros((len(gp), len(gp)))
        c_free, cov_free = _wlstsq(A[:, ~fixed], y, w, absolute_weights=True)
        coef[~fixed] = c_free
        cov[np.ix_(~fixed, ~fixed)] = cov_free
        fits.append(_PieceFit(lo, hi, gp, coef, cov, fixed))
    return _assemble(body, fits)


# ---------------------------------------------------------------------------
# analytic


def _ball_pieces(body: Ball):
    a = body.radius
    v2 = body.measure**2
    # distance density of two uniform points in a ball, times V^2
    coef = (3.0 * v2 / a**3, -9.0 * v2 / (4.0 * a**4), 3.0 * v2 / (16.0 * a**6))
    return (Piece(0.0, 2.0 * a, (2, 3, 5), coef, tuple((0.0,) * 3 for _ in range(3))),)


def disk_covariance(rho, a):
    """Area of overlap of two disks of radius ``a`` whose centres are ``rho`` apart."""
    x = np.clip(np.asarray(rho, dtype=float) / (2.0 * a), 0.0, 1.0)
    return 2.0 * a * a * (np.arccos(x) - x * np.sqrt(1.0 - x * x))


def _cylinder_pieces(body: Cylinder, nodes=400):
    a = body.radius
    bps = body.breakpoints
    pieces = []
    for i, (lo, hi) in enumerate(zip(bps[:-1], bps[1:])):
        gp = _piece_powers(body, i)
        t = np.cos(np.pi * (np.arange(nodes) + 0.5) / nodes)
        rr = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t
        A = np.stack([rr**j for j in gp], axis=1)
        coef, *_ = np.linalg.lstsq(A, disk_covariance(rr, a), rcond=None)
        pieces.append(_to_piece(lo, hi, gp, coef, np.zeros((len(gp), len(gp))), 2))
    return tuple(pieces)


# ---------------------------------------------------------------------------
# grid autocorrelation


def lattice_shell_counts(max_m, dim):
    """Number of integer vectors k in Z^dim with |k|^2 = m, for m = 0..max_m."""
    kmax = math.isqrt(max_m)
    r1 = np.zeros(max_m + 1)
    k = np.arange(-kmax, kmax + 1)
    np.add.at(r1, k * k, 1.0)
    out = r1
    for _ in range(dim - 1):
        out = np.rint(fftconvolve(out, r1)[: max_m + 1])
    return out


def voxelize(body: FiniteBody, resolution: int, supersample: int = 4):
    """Occupancy fractions of ``body`` on a cubic grid over its bounding box.

    Returns ``(field, delta, variance)`` where ``variance`` is the per-axis
    variance of the sub-voxel sampling kernel (0 for grid-aligned bodies,
    whose occupancies are exact).
    """
    lo, hi = body.bounding_box()
    delta = float(np.max(hi - lo)) / resolution
    shape = tuple(int(math.ceil((h - l) / delta - 1e-9)) for l, h in zip(lo, hi))
    axes = [l + (np.arange(n) + 0.5) * delta for l, n in zip(lo, shape)]
    if body.grid_aligned:
        supersample = 1
    sub = max(int(supersample), 1)
    offsets = ((np.arange(sub) + 0.5) / sub - 0.5) * delta
    band = 0.5 * delta * math.sqrt(body.dim)
    out = np.zeros(shape)
    first = list(np.meshgrid(*axes[:-1], indexing="ij"))
    sub_grid = np.stack(np.meshgrid(*([offsets] * body.dim), indexing="ij"), axis=-1).reshape(-1, body.dim)
    for iz, z in enumerate(axes[-1]):
        pts = np.stack(first + [np.full(first[0].shape, z)], axis=-1)
        sd = body.signed_distance(pts)
        frac = (sd <= 0).astype(float)
        edge = np.abs(sd) < band
        if sub > 1 and np.any(edge):
            ep = pts[edge]
            inside = np.zeros(ep.shape[0])
            for off in sub_grid:
                inside += body.contains(ep + off)
            frac[edge] = inside / len(sub_grid)
        out[..., iz] = frac
    variance = delta**2 * (sub * sub - 1) / (12.0 * sub * sub)
    return out, delta, variance


def _autocorrelation(field_, dtype, workers):
    shape = tuple(sfft.next_fast_len(2 * n - 1, real=True) for n in field_.shape)
    F = sfft.rfftn(field_.astype(dtype), s=shape, workers=workers)
    F *= F.conj()
    return sfft.irfftn(F, s=shape, workers=workers, overwrite_x=True)


def grid_shell_samples(body, resolution, supersample=4, precision="auto", workers=1):
    """Angular-mean covariance on exact lattice spheres.

    Returns ``(r, gbar, counts, delta, variance)``.
    """
    field_, delta, variance = voxelize(body, resolution, supersample)
    if precision == "auto":
        precision = "double" if field_.size <= 160**3 else "single"
    dtype = np.float64 if precision == "double" else np.float32
    g = _autocorrelation(field_, dtype, workers)
    del field_
    max_m = int(math.floor((body.diameter / delta) ** 2)) + 1
    lags = []
    for n in g.shape:
        k = np.arange(n)
        lags.append(np.where(k < (n + 1) // 2, k, k - n).astype(np.int64) ** 2)
    sums = np.zeros(max_m + 1)
    if body.dim == 3:
        rest = (lags[1][:, None] + lags[2][None, :]).ravel()
        for ix in range(g.shape[0]):
            m = rest + lags[0][ix]
            keep = m <= max_m
            sums += np.bincount(m[keep], weights=g[ix].ravel()[keep].astype(np.float64), minlength=max_m + 1)
    else:
        m = (lags[0][:, None] + lags[1][None, :]).ravel()
        keep = m <= max_m
        sums += np.bincount(m[keep], weights=g.ravel()[keep].astype(np.float64), minlength=max_m + 1)
    del g
    counts = lattice_shell_counts(max_m, body.dim)
    mm = np.nonzero(counts[1:])[0] + 1
    r = delta * np.sqrt(mm)
    gbar = sums[mm] / counts[mm] * delta**body.dim
    return r, gbar, counts[mm], delta, variance


# ---------------------------------------------------------------------------
# Monte Carlo


def _sample_points(body, rng, n):
    lo, hi = body.bounding_box()
    chunks, have = [], 0
    while have < n:
        cand = lo + (hi - lo) * rng.random((max(2 * (n - have), 1024), body.dim))
        cand = cand[body.contains(cand)]
        chunks.append(cand)
        have += len(cand)
    return np.concatenate(chunks)[:n]


def _mc_chunk(body, seed_seq, n, edges):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    x = _sample_points(body, rng, n)
    y = _sample_points(body, rng, n)
    d = np.linalg.norm(x - y, axis=1)
    idx = np.searchsorted(edges, d, side="right") - 1
    idx = np.clip(idx, 0, len(edges) - 2)
    return np.bincount(idx, minlength=len(edges) - 1).astype(np.int64)


def histogram_edges(body, bins=240):
    """Bin edges aligned with the body's breakpoints."""
    width = body.diameter / bins
    bps = body.breakpoints
    edges = [0.0]
    for lo, hi in zip(bps[:-1], bps[1:]):
        n = max(int(round((hi - lo) / width)), 12)
        edges.extend(lo + (hi - lo) * np.arange(1, n + 1) / n)
    return np.array(edges)


def monte_carlo_histogram(body, samples, seed, workers=1, bins=240):
    """Pair-distance histogram from ``samples`` independent uniform pairs.

    The work is split into fixed chunks with spawned sub-seeds, so the
    counts do not depend on ``workers``.
    """
    edges = histogram_edges(body, bins)
    n_chunks = -(-samples // MC_CHUNK)
    sizes = [MC_CHUNK] * (n_chunks - 1) + [samples - MC_CHUNK * (n_chunks - 1)]
    seqs = np.random.SeedSequence(seed).spawn(n_chunks)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _mc_chunk(body, a[0], a[1], edges), zip(seqs, sizes)))
    else:
        parts = [_mc_chunk(body, s, n, edges) for s, n in zip(seqs, sizes)]
    counts = np.zeros(len(edges) - 1, dtype=np.int64)
    for part in parts:
        counts += part
    return edges, counts


# ---------------------------------------------------------------------------
# public entry point


def _cache_key(body, method, resolution, samples, seed, supersample, precision):
    key = {
        "body": body.to_dict(),
        "method": method.value,
        "resolution": resolution,
        "samples": samples,
        "seed": seed,
        "supersample": supersample,
        "precision": precision,
        "fit_version": FIT_VERSION,
    }
    return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:24]


def pair_distance_density(
    body: Body,
    method: Method | str = Method.GRID,
    resolution: int = 256,
    seed: int | None = None,
    *,
    samples: int = 10_000_000,
    supersample: int = 4,
    precision: str = "auto",
    workers: int = 1,
    cache_dir: str | Path | None = None,
) -> PairDistanceDensity:
    """Build the pair-distance density of ``body``.

    Parameters
    ----------
    body : FiniteBody
        Ball, Cube or Cylinder (cross-section, per unit length).
    method : {"analytic", "grid", "monte_carlo"}
        ``analytic`` exists for Ball and Cylinder only.
    resolution : int
        Grid cells across the bounding box (``grid`` only, >= 32).
    seed : int
        Required for ``monte_carlo``; there is no default entropy source.
    samples : int
        Number of point pairs for ``monte_carlo`` (>= 1e5).
    workers : int
        Threads for FFTs and Monte Carlo chunks.  Never changes the result.
    cache_dir : path, optional
        Directory of cached JSON densities keyed by a content hash.
    """
    method = Method(method)
    if not isinstance(body, FiniteBody):
        raise CapabilityError(f"pair densities are defined for finite bodies, not {type(body).__name__}")
    if method is Method.ANALYTIC and not isinstance(body, (Ball, Cylinder)):
        raise CapabilityError(f"no analytic pair density for {body.kind}; use 'grid' or 'monte_carlo'")
    if method is Method.GRID and not resolution >= MIN_GRID_RESOLUTION:
        raise DomainError(f"grid resolution must be >= {MIN_GRID_RESOLUTION}")
    if method is Method.MONTE_CARLO:
        if seed is None:
            raise DomainError("Monte Carlo pair densities need an explicit seed")
        if not samples >= MIN_MC_SAMPLES:
            raise DomainError(f"Monte Carlo needs >= {MIN_MC_SAMPLES} samples")

    prov = {"method": method.value, "resolution": None, "samples": None, "seed": None}
    if method is Method.GRID:
        prov.update(resolution=int(resolution), supersample=int(supersample), precision=precision)
    elif method is Method.MONTE_CARLO:
        prov.update(samples=int(samples), seed=int(seed))

    cache_path = None
    if cache_dir is not None:
        key = _cache_key(body, method, prov["resolution"], prov["samples"], prov["seed"], supersample, precision)
        cache_path = Path(cache_dir) / f"{body.kind}-{method.value}-{key}.json"
        if cache_path.exists():
            return PairDistanceDensity.from_json(cache_path.read_text())

    if method is Method.ANALYTIC:
        pieces = _ball_pieces(body) if isinstance(body, Ball) else _cylinder_pieces(body)
    elif method is Method.GRID:
        r, gbar, counts, delta, var = grid_shell_samples(body, resolution, supersample, precision, workers)
        pieces = _fit_samples(body, r, gbar, counts, r_min=3.0 * delta, var=var)
    else:
        edges, counts = monte_carlo_histogram(body, samples, seed, workers)
        pieces = _fit_histogram(body, edges, counts.astype(float), samples)

    total = body.measure**2
    if method is Method.ANALYTIC and isinstance(body, Cylinder):
        pieces = _renormalized(pieces, total)
    density = PairDistanceDensity(body.dim, pieces, total, prov, body.to_dict())
    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        cache_path.write_text(density.to_json(indent=1))
    return density


def body_of(density: PairDistanceDensity) -> Body:
    return body_from_dict(density.body)
