"""Independent reference computations used by the tests.

Nothing here imports the package's pair-density code: the cube density is
computed by direct angular quadrature of the set covariance, the ball
density by brute-force sampling of point pairs.
"""
import math

import numpy as np
from scipy import integrate

_XG, _WG = np.polynomial.legendre.leggauss(48)


def cube_pair_density(r):
    """Ordered-pair distance density of the unit cube at separation r.

    Integrates the covariance (1 - |hx|)(1 - |hy|)(1 - |hz|) over the
    sphere of radius r, using the octant symmetry (phi in [0, pi/4]) and
    the explicit theta range where all three factors stay positive.
    """
    if r <= 0 or r >= math.sqrt(3):
        return 0.0

    def over_theta(phi):
        lo = math.acos(min(1.0, 1.0 / r))
        m = max(math.cos(phi), math.sin(phi))
        hi = math.asin(1.0 / (r * m)) if r * m > 1 else math.pi / 2
        if hi <= lo:
            return 0.0
        th = 0.5 * (hi - lo) * _XG + 0.5 * (hi + lo)
        s, c = np.sin(th), np.cos(th)
        f = (1 - r * s * math.cos(phi)) * (1 - r * s * math.sin(phi)) * (1 - r * c) * s
        return 0.5 * (hi - lo) * float(np.dot(_WG, f))

    # kinks in phi: where the theta range starts to be cut by the side
    # faces, and (beyond sqrt 2) where it closes up entirely
    pts = None
    if 1 < r < math.sqrt(2):
        pts = [math.pi / 2 - math.acos(1 / r)]
    elif r > math.sqrt(2):
        pts = [math.acos(min(1.0, 1 / math.sqrt(r * r - 1)))]
    v, _ = integrate.quad(over_theta, 0, math.pi / 4, points=pts, epsabs=1e-13, epsrel=1e-11, limit=200)
    return 16 * r * r * v


def cube_polynomial_part(r):
    """Closed form of the cube density for r <= 1."""
    return 4 * math.pi * r**2 - 6 * math.pi * r**3 + 8 * r**4 - r**5


CUBE_PIECES = ((1.0, math.sqrt(2.0)), (math.sqrt(2.0), math.sqrt(3.0)))


def cube_pure_term():
    """Pure term of the unit perfectly conducting cube, hbar c / a.

    On [0, 1] the density is a polynomial and the finite part of its
    integral against r**-7 is pi - 3 by analytic continuation; beyond r = 1
    the integral converges and is done by quadrature.
    """
    tail = sum(
        integrate.quad(lambda r: cube_pair_density(r) * r**-7, lo, hi, epsabs=1e-13, epsrel=1e-11)[0]
        for lo, hi in CUBE_PIECES
    )
    finite_part = math.pi - 3.0 + tail
    n_alpha = 3.0 / (4.0 * math.pi)
    return 0.5 * n_alpha**2 * (-23.0 / (4.0 * math.pi)) * finite_part


# Frozen outputs of cube_pure_term() (recomputed by test_oracles.py).
CUBE_TAIL_INTEGRAL = 0.05217271314577985
CUBE_PURE_TERM = -0.01010617728302663


def ball_pair_histogram(samples, seed, edges, radius=1.0):
    """Histogram of distances between independent uniform points in a ball."""
    rng = np.random.default_rng(seed)

    def points(n):
        out = []
        have = 0
        while have < n:
            c = rng.uniform(-radius, radius, size=(2 * n, 3))
            c = c[np.einsum("ij,ij->i", c, c) <= radius * radius]
            out.append(c)
            have += len(c)
        return np.concatenate(out)[:n]

    counts = np.zeros(len(edges) - 1)
    left = samples
    while left:
        n = min(left, 1 << 20)
        d = np.linalg.norm(points(n) - points(n), axis=1)
        counts += np.histogram(d, bins=edges)[0]
        left -= n
    return counts


def ball_density_formula(r, radius=1.0):
    """Distance density of the ball normalized to integrate to 1."""
    x = r / radius
    return (3 * x**2 - 2.25 * x**3 + 0.1875 * x**5) / radius


def planar_energy_oracle(d):
    """Pairwise energy per area of two perfectly conducting half-spaces at gap d.

    The lateral integral of r**-7 over a plane at height z is 2 pi / (5 z**5);
    integrating the overlap weight (z - d) over z >= d gives pi / (30 d**3).
    """
    n_alpha = 3.0 / (4.0 * math.pi)
    return -(23.0 / (4.0 * math.pi)) * n_alpha**2 * math.pi / (30.0 * d**3)
