from .bodies import Ball, Body, Cube, Cylinder, FiniteBody, HalfSpace, PointAtom, Slab, body_from_dict
from .energy import interaction_energy_disjoint, planar_pressure, self_energy_with_cutoff
from .pairdensity import Method, PairDistanceDensity, pair_distance_density

__all__ = [
    "Ball",
    "Body",
    "Cube",
    "Cylinder",
    "FiniteBody",
    "HalfSpace",
    "PointAtom",
    "Slab",
    "body_from_dict",
    "interaction_energy_disjoint",
    "planar_pressure",
    "self_energy_with_cutoff",
    "Method",
    "PairDistanceDensity",
    "pair_distance_density",
]
