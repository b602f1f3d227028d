"""Body geometries.

Finite bodies (:class:`Ball`, :class:`Cube`, :class:`Cylinder`) carry what the
pair-distance machinery needs: a bounding box, an inside test, a signed
distance for voxelization and the natural breakpoints of their pair-distance
density.  The infinite cylinder is reduced to its circular cross-section, so
it behaves as a 2-D body whose extensive quantities are per unit length.

Half-spaces and slabs are bounded by planes normal to z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from ..errors import DomainError


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a positive finite length, got {value!r}")


def _vec3(v):
    arr = tuple(float(x) for x in v)
    if len(arr) != 3:
        raise DomainError(f"expected a 3-vector, got {v!r}")
    return arr


class Body:
    """Common base; only used for isinstance checks and serialization."""

    kind: ClassVar[str] = "body"

    def to_dict(self) -> dict:
        raise NotImplementedError


class FiniteBody(Body):
    """Body with a finite pair-distance support.

    Subclasses define

    ``dim``            dimension of the pair integral (3, or 2 for the
                       axially reduced cylinder)
    ``size``           characteristic length ``a``
    ``measure``        volume (or cross-section area)
    ``diameter``       largest pair separation
    ``breakpoints``    radii where the pair density changes analytic form
                       (or where the fit is split), starting at 0
    ``small_r_powers`` powers of r in the small-r expansion of the
                       angular-mean covariance, truncated to the terms the
                       fits resolve
    """

    dim: ClassVar[int] = 3
    small_r_powers: ClassVar[tuple[int, ...]] = ()
    tail_degree: ClassVar[int] = 3
    #: True when the voxel grid can be aligned with the body so that
    #: voxel occupancies are exactly 0 or 1.
    grid_aligned: ClassVar[bool] = False

    @property
    def size(self) -> float:
        raise NotImplementedError

    @property
    def measure(self) -> float:
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        raise NotImplementedError

    @property
    def boundary_measure(self) -> float:
        """Surface area (perimeter for the 2-D cross-section)."""
        raise NotImplementedError

    def covariance_start(self) -> tuple[float, float]:
        """Exact (g(0), g'(0)) of the angular-mean set covariance.

        g(0) is the measure; the slope is -S/4 in 3-D and -L/pi in 2-D for a
        body with boundary measure S (or perimeter L).
        """
        slope = self.boundary_measure / (4.0 if self.dim == 3 else math.pi)
        return self.measure, -slope

    @property
    def breakpoints(self) -> tuple[float, ...]:
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def signed_distance(self, pts: np.ndarray) -> np.ndarray:
        """Signed distance to the surface, negative inside.

        Only needs to be exact near the surface and correct in sign
        elsewhere; it decides which voxels get supersampled.
        """
        raise NotImplementedError

    def contains(self, pts: np.ndarray) -> np.ndarray:
        return self.signed_distance(pts) <= 0.0


@dataclass(frozen=True)
class Ball(FiniteBody):
    radius: float
    center: tuple = (0.0, 0.0, 0.0)

    kind: ClassVar[str] = "ball"
    dim: ClassVar[int] = 3
    # covariance of a ball is V(1 - 3r/4a + r^3/16a^3): no r^2 term
    small_r_powers: ClassVar[tuple[int, ...]] = (0, 1, 3)

    def __post_init__(self):
        _positive("radius", self.radius)
        object.__setattr__(self, "center", _vec3(self.center))

    @property
    def size(self):
        return self.radius

    @property
    def measure(self):
        return 4.0 * math.pi * self.radius**3 / 3.0

    @property
    def diameter(self):
        return 2.0 * self.radius

    @property
    def boundary_measure(self):
        return 4.0 * math.pi * self.radius**2

    @property
    def breakpoints(self):
        return (0.0, 2.0 * self.radius)

    def bounding_box(self):
        c = np.array(self.center)
        return c - self.radius, c + self.radius

    def signed_distance(self, pts):
        return np.linalg.norm(pts - np.array(self.center), axis=-1) - self.radius

    def to_dict(self):
        return {"kind": self.kind, "radius": self.radius, "center": list(self.center)}


@dataclass(frozen=True)
class Cube(FiniteBody):
    """Cube of edge ``side``; ``rotation`` maps body axes to world axes."""

    side: float
    center: tuple = (0.0, 0.0, 0.0)
    rotation: tuple | None = None

    kind: ClassVar[str] = "cube"
    dim: ClassVar[int] = 3
    small_r_powers: ClassVar[tuple[int, ...]] = (0, 1, 2, 3)

    def __post_init__(self):
        _positive("side", self.side)
        object.__setattr__(self, "center", _vec3(self.center))
        if self.rotation is not None:
            rot = np.asarray(self.rotation, dtype=float)
            if rot.shape != (3, 3) or not np.allclose(rot @ rot.T, np.eye(3), atol=1e-12):
                raise DomainError("rotation must be a 3x3 orthogonal matrix")
            object.__setattr__(self, "rotation", tuple(tuple(row) for row in rot))

    @property
    def grid_aligned(self):
        return self.rotation is None

    @property
    def size(self):
        return self.side

    @property
    def measure(self):
        return self.side**3

    @property
    def diameter(self):
        return math.sqrt(3.0) * self.side

    @property
    def boundary_measure(self):
        return 6.0 * self.side**2

    @property
    def breakpoints(self):
        a = self.side
        return (0.0, a, math.sqrt(2.0) * a, math.sqrt(3.0) * a)

    def _rot(self):
        return np.eye(3) if self.rotation is None else np.asarray(self.rotation)

    def bounding_box(self):
        half = 0.5 * self.side * np.abs(self._rot()).sum(axis=1)
        c = np.array(self.center)
        return c - half, c + half

    def signed_distance(self, pts):
        # world -> body frame: x_body = R^T (x - c)
        local = (pts - np.array(self.center)) @ self._rot()
        q = np.abs(local) - 0.5 * self.side
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
        inside = np.minimum(q.max(axis=-1), 0.0)
        return outside + inside

    def to_dict(self):
        return {
            "kind": self.kind,
            "side": self.side,
            "center": list(self.center),
            "rotation": None if self.rotation is None else [list(r) for r in self.rotation],
        }


@dataclass(frozen=True)
class Cylinder(FiniteBody):
    """Infinite circular cylinder along z, handled through its cross-section.

    Every extensive quantity (measure, pair measure, energy) is per unit
    axial length.
    """

    radius: float
    per_unit_length: bool = True

    kind: ClassVar[str] = "cylinder"
    dim: ClassVar[int] = 2
    # disk covariance: only odd powers beyond the constant
    small_r_powers: ClassVar[tuple[int, ...]] = (0, 1, 3, 5, 7)
    tail_degree: ClassVar[int] = 4

    def __post_init__(self):
        _positive("radius", self.radius)
        if not self.per_unit_length:
            raise DomainError("only the infinite (per-unit-length) cylinder is supported")

    @property
    def size(self):
        return self.radius

    @property
    def measure(self):
        return math.pi * self.radius**2

    @property
    def diameter(self):
        return 2.0 * self.radius

    @property
    def boundary_measure(self):
        return 2.0 * math.pi * self.radius

    @property
    def breakpoints(self):
        a = self.radius
        # first split keeps the truncated odd-power series accurate
        return (0.0, 0.75 * a, a, 1.5 * a, 2.0 * a)

    def bounding_box(self):
        return np.full(2, -self.radius), np.full(2, self.radius)

    def signed_distance(self, pts):
        return np.linalg.norm(pts, axis=-1) - self.radius

    def to_dict(self):
        return {"kind": self.kind, "radius": self.radius, "per_unit_length": True}


@dataclass(frozen=True)
class HalfSpace(Body):
    """z <= offset (``upper=False``) or z >= offset (``upper=True``)."""

    offset: float = 0.0
    upper: bool = False

    kind: ClassVar[str] = "half_space"

    def z_range(self):
        return (self.offset, math.inf) if self.upper else (-math.inf, self.offset)

    def to_dict(self):
        return {"kind": self.kind, "offset": self.offset, "upper": self.upper}


@dataclass(frozen=True)
class Slab(Body):
    """offset <= z <= offset + thickness."""

    thickness: float
    offset: float = 0.0

    kind: ClassVar[str] = "slab"

    def __post_init__(self):
        _positive("thickness", self.thickness)

    def z_range(self):
        return (self.offset, self.offset + self.thickness)

    def to_dict(self):
        return {"kind": self.kind, "thickness": self.thickness, "offset": self.offset}


@dataclass(frozen=True)
class PointAtom(Body):
    position: tuple = (0.0, 0.0, 0.0)
    alpha: float = 1.0

    kind: ClassVar[str] = "point_atom"

    def __post_init__(self):
        object.__setattr__(self, "position", _vec3(self.position))
        if not self.alpha >= 0:
            raise DomainError("polarizability must be non-negative")

    def to_dict(self):
        return {"kind": self.kind, "position": list(self.position), "alpha": self.alpha}


_KINDS = {cls.kind: cls for cls in (Ball, Cube, Cylinder, HalfSpace, Slab, PointAtom)}


def body_from_dict(data: dict) -> Body:
    data = dict(data)
    try:
        cls = _KINDS[data.pop("kind")]
    except KeyError as exc:
        raise DomainError(f"unknown body kind in {data!r}") from exc
    if cls is Cube and data.get("rotation") is not None:
        data["rotation"] = tuple(tuple(r) for r in data["rotation"])
    for key in ("center", "position"):
        if key in data:
            data[key] = tuple(data[key])
    return cls(**data)
