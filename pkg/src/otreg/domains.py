"""Domain generators for experiment configs.

All generators return unit-area convex polygons (the solver rescales
masses, so unit area keeps constants comparable across runs).
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull

from .geometry import ConvexPolygon


class DomainError(ValueError):
    pass


def _unit_area(poly: ConvexPolygon) -> ConvexPolygon:
    return poly.scale_about(poly.centroid(), 1.0 / np.sqrt(poly.area()))


def regular_ngon(sides: int) -> ConvexPolygon:
    if sides < 3:
        raise DomainError("need at least 3 sides")
    th = 2 * np.pi * np.arange(sides) / sides
    poly = ConvexPolygon(np.column_stack([np.cos(th), np.sin(th)]))
    return _unit_area(poly)


def rectangle(aspect: float) -> ConvexPolygon:
    if aspect <= 0:
        raise DomainError("aspect must be positive")
    a = np.sqrt(aspect)
    return ConvexPolygon([[0, 0], [a, 0], [a, 1 / a], [0, 1 / a]])


def random_hull(n_points: int, seed: int) -> ConvexPolygon:
    if n_points < 3:
        raise DomainError("need at least 3 points")
    rng = np.random.default_rng(seed)
    for _ in range(64):
        pts = rng.random((n_points, 2))
        try:
            hull = ConvexHull(pts)
        except Exception:
            continue
        if len(hull.vertices) >= 3:
            return _unit_area(ConvexPolygon(pts[hull.vertices]))
    raise DomainError("could not build a hull from the seeded points")


def wedge(angle: float) -> ConvexPolygon:
    """Unit-area triangle with the given apex angle at the origin."""
    if not (0 < angle < np.pi):
        raise DomainError("apex angle must be in (0, pi)")
    ell = np.sqrt(2.0 / np.sin(angle))
    return ConvexPolygon([[0, 0], [ell, 0],
                          [ell * np.cos(angle), ell * np.sin(angle)]])


def rotated_square(angle_deg: float) -> ConvexPolygon:
    """Unit square rotated about its center."""
    th = np.radians(angle_deg)
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    sq = np.array([[0.0, 0], [1, 0], [1, 1], [0, 1]])
    c = np.array([0.5, 0.5])
    return ConvexPolygon(c + (sq - c) @ rot.T)


def corner_pair() -> tuple[ConvexPolygon, ConvexPolygon]:
    """Critical-corner pair: both domains have a corner at the origin
    and live in the quadrant {x1 <= 0, x2 >= 0}; the source corner is a
    right angle whose tangents are orthogonal to the target's."""
    r2 = np.sqrt(2.0)
    source = ConvexPolygon([[-1, 0], [0, 0], [0, 1], [-1, 1]])
    target = ConvexPolygon([[0, 0], [0, r2], [-r2, 0]])
    return source, target


GENERATORS = {
    "regular_ngon": regular_ngon,
    "rectangle": rectangle,
    "random_hull": random_hull,
    "wedge": wedge,
    "rotated_square": rotated_square,
}


def generate_domain(spec: dict) -> ConvexPolygon:
    """Build a polygon from a config spec.

    Either {"vertices": [[x, y], ...]} or
    {"generator": name, "params": {...}}.
    """
    if "vertices" in spec:
        return ConvexPolygon(np.asarray(spec["vertices"], float))
    name = spec.get("generator")
    if name not in GENERATORS:
        raise DomainError(f"unknown domain generator: {name!r}")
    params = dict(spec.get("params", {}))
    return GENERATORS[name](**params)


def domain_pair(spec: dict) -> tuple[ConvexPolygon, ConvexPolygon]:
    """Build the (source, target) pair from the config's domain block."""
    if spec.get("pair") == "corner":
        return corner_pair()
    if "pair" in spec:
        raise DomainError(f"unknown domain pair: {spec['pair']!r}")
    source = generate_domain(spec["source"])
    target = generate_domain(spec["target"]) if "target" in spec else source
    return source, target
