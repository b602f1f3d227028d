"""Spring-suspended plate facing a fixed plate under Casimir attraction.

With gap d, rest gap d0 and spring constant k the dimensionless gap
x = d / d0 obeys, in time units of 1/sqrt(k/m),

    x'' = (1 - x) - lam / x**4 - g x'

where lam = pi^2 hbar c A / (240 k d0^5) and g = gamma / sqrt(k m).
Force balance (1 - x) x^4 = lam has two roots for lam < 256/3125, one
double root x = 4/5 at equality and none above, where the plate collapses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace, asdict

import numpy as np
from scipy.optimize import brentq

from .constants import ATM, HBAR_C
from .errors import DomainError

LAMBDA_CRITICAL = 256.0 / 3125.0
GAP_CRITICAL = 0.8
CONTACT_FLOOR = 1e-3
MIN_STEPS_PER_PERIOD = 50
# |lam - lam*| below this counts as the double root
_MARGINAL_TOL = 1e-14


@dataclass(frozen=True)
class OscillatorConfig:
    """SI parameters: k (N/m), rest gap d0 (m), area (m^2), mass (kg), damping (kg/s)."""

    k: float
    d0: float
    area: float
    mass: float = 1e-9
    damping: float = 0.0

    def __post_init__(self):
        for name in ("k", "d0", "area", "mass"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")
        if not self.damping >= 0:
            raise DomainError("damping must be non-negative")

    @property
    def omega0(self) -> float:
        return math.sqrt(self.k / self.mass)

    @property
    def reduced_damping(self) -> float:
        return self.damping / math.sqrt(self.k * self.mass)

    def to_dict(self):
        return asdict(self)


def casimir_force_si(d, area):
    """Attractive plate force magnitude pi^2 hbar c A / (240 d^4), in N."""
    return math.pi**2 * HBAR_C * area / (240.0 * d**4)


def lambda_param(config: OscillatorConfig) -> float:
    return math.pi**2 * HBAR_C * config.area / (240.0 * config.k * config.d0**5)


def net_force(x, lam):
    """Dimensionless net force on the plate at gap x (positive opens the gap)."""
    return (1.0 - x) - lam / x**4


def stiffness(x, lam):
    """d(net force)/dx; negative means stable."""
    return -1.0 + 4.0 * lam / x**5


@dataclass(frozen=True)
class Equilibrium:
    gap: float  # d / d0
    stability: str  # "stable", "unstable" or "marginal"

    def to_dict(self):
        return asdict(self)


def equilibria_for_lambda(lam: float) -> list[Equilibrium]:
    """Roots of (1 - x) x^4 = lam on (0, 1], largest first."""
    if not lam >= 0:
        raise DomainError("lambda must be non-negative")
    if lam == 0:
        return [Equilibrium(1.0, "stable")]
    if abs(lam - LAMBDA_CRITICAL) <= _MARGINAL_TOL:
        return [Equilibrium(GAP_CRITICAL, "marginal")]
    if lam > LAMBDA_CRITICAL:
        return []
    g = lambda x: (1.0 - x) * x**4 - lam
    roots = [
        brentq(g, GAP_CRITICAL, 1.0, xtol=1e-16, rtol=1e-15, maxiter=500),
        brentq(g, 0.0, GAP_CRITICAL, xtol=1e-16, rtol=1e-15, maxiter=500),
    ]
    return [Equilibrium(x, "stable" if stiffness(x, lam) < 0 else "unstable") for x in roots]


def equilibria(config: OscillatorConfig) -> list[Equilibrium]:
    return equilibria_for_lambda(lambda_param(config))


def stable_gap(lam: float) -> float | None:
    for eq in equilibria_for_lambda(lam):
        if eq.stability == "stable":
            return eq.gap
    return None


def reduced_energy(x, v, lam):
    return 0.5 * v * v + 0.5 * (x - 1.0) ** 2 - lam / (3.0 * x**3)


@dataclass
class Trajectory:
    t: np.ndarray  # s
    gap: np.ndarray  # m
    velocity: np.ndarray  # m/s
    energy: np.ndarray  # J
    contact: bool
    contact_time: float | None
    lam: float

    def max_energy_drift(self) -> float:
        e0 = self.energy[0]
        return float(np.max(np.abs(self.energy - e0)) / abs(e0))

    def rows(self):
        return zip(self.t.tolist(), self.gap.tolist(), self.velocity.tolist())


def linear_period(config: OscillatorConfig) -> float:
    """Small-oscillation period (s) about the stable equilibrium, or of the bare spring."""
    lam = lambda_param(config)
    x = stable_gap(lam)
    w2 = 1.0 if x is None else -stiffness(x, lam)
    return 2.0 * math.pi / (config.omega0 * math.sqrt(max(w2, 1e-300)))


def simulate(
    config: OscillatorConfig,
    initial_gap: float,
    initial_velocity: float,
    duration: float,
    timestep: float,
    *,
    contact_floor: float | None = None,
    record_every: int = 1,
) -> Trajectory:
    """Integrate the plate motion; gaps in m, times in s.

    Velocity Verlet for the conservative force.  Damping enters through an
    exact exponential half-step on either side, which leaves the scheme
    symplectic when ``damping == 0``.  The run stops with a contact event
    once the gap falls to ``contact_floor`` (default 1e-3 d0).
    """
    d0 = config.d0
    if not 0 < initial_gap <= d0:
        raise DomainError("initial gap must lie in (0, d0]")
    if not (duration > 0 and timestep > 0):
        raise DomainError("duration and timestep must be positive")
    period = linear_period(config)
    if timestep > period / MIN_STEPS_PER_PERIOD:
        raise DomainError(
            f"timestep {timestep:.3g} s does not resolve the linear period {period:.3g} s "
            f"with {MIN_STEPS_PER_PERIOD} steps"
        )
    floor = CONTACT_FLOOR if contact_floor is None else contact_floor / d0
    lam = lambda_param(config)
    w0 = config.omega0
    h = timestep * w0
    n = int(math.ceil(duration / timestep - 1e-9))
    decay = math.exp(-0.5 * config.reduced_damping * h)
    stride = max(int(record_every), 1)

    x = initial_gap / d0
    v = initial_velocity / (d0 * w0)
    ts, xs, vs = [0.0], [x], [v]
    contact_time = None
    a = (1.0 - x) - lam / x**4
    for i in range(1, n + 1):
        x_prev = x
        v *= decay
        v += 0.5 * h * a
        x += h * v
        if x <= floor:
            # linear interpolation of the crossing inside this step
            frac = (x_prev - floor) / (x_prev - x) if x_prev != x else 1.0
            contact_time = (i - 1 + frac) * timestep
            ts.append(contact_time)
            xs.append(floor)
            vs.append(v * decay)
            break
        a = (1.0 - x) - lam / (x * x * x * x)
        v += 0.5 * h * a
        v *= decay
        if i % stride == 0 or i == n:
            ts.append(i * timestep)
            xs.append(x)
            vs.append(v)

    xs_a = np.array(xs)
    vs_a = np.array(vs)
    scale = config.k * d0 * d0
    return Trajectory(
        t=np.array(ts),
        gap=xs_a * d0,
        velocity=vs_a * d0 * w0,
        energy=scale * reduced_energy(xs_a, vs_a, lam),
        contact=contact_time is not None,
        contact_time=contact_time,
        lam=lam,
    )


@dataclass(frozen=True)
class BranchPoint:
    direction: str  # "forward" or "backward"
    value: float  # swept parameter
    lam: float
    gap: float | None  # d / d0 on the followed branch, None once collapsed
    state: str  # "attached" or "collapsed"

    def to_dict(self):
        return asdict(self)


@dataclass
class SweepResult:
    parameter: str
    points: list
    pull_in: dict | None

    def to_dict(self):
        return {
            "parameter": self.parameter,
            "points": [p.to_dict() for p in self.points],
            "pull_in": self.pull_in,
        }


SWEEPABLE = ("k", "d0")


def hysteresis_sweep(template: OscillatorConfig, parameter: str, values) -> SweepResult:
    """Quasi-static sweep of ``k`` or ``d0`` over ``values`` and back.

    The plate follows the stable branch until it disappears (pull-in) and
    then stays collapsed: the model has no force that could release it, so
    the return sweep does not reattach.
    """
    if parameter not in SWEEPABLE:
        raise DomainError(f"sweep parameter must be one of {SWEEPABLE}")
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or len(vals) < 2:
        raise DomainError("need at least two sweep values")
    steps = np.diff(vals)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise DomainError("sweep values must be strictly monotone")

    points, pull_in = [], None
    collapsed = False
    last_gap = None
    for direction, seq in (("forward", vals), ("backward", vals[::-1])):
        for val in seq:
            cfg = replace(template, **{parameter: float(val)})
            lam = lambda_param(cfg)
            gap = None if collapsed else stable_gap(lam)
            if gap is None and not collapsed:
                collapsed = True
                pull_in = {
                    "direction": direction,
                    "value": float(val),
                    "lam": lam,
                    "last_attached_gap": last_gap,
                }
            if collapsed:
                points.append(BranchPoint(direction, float(val), lam, None, "collapsed"))
            else:
                last_gap = gap
                points.append(BranchPoint(direction, float(val), lam, gap, "attached"))
    return SweepResult(parameter, points, pull_in)


def pressure_at_gap(d: float) -> tuple[float, float]:
    """Magnitude of the ideal-plate Casimir pressure at gap ``d`` (m), as (Pa, atm)."""
    if not d > 0:
        raise DomainError("gap must be positive")
    p = math.pi**2 * HBAR_C / (240.0 * d**4)
    return p, p / ATM
