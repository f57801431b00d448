"""Robust 2-D convex geometry primitives.

Convex polygons (CCW vertex lists), ellipses, unimodular affine maps,
tangent rays and cones.  All types are immutable values and all
operations are pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

# Relative tolerance used by geometric predicates (times the diameter of
# the object involved).
REL_TOL = 1e-10
# Collinearity threshold for merging consecutive edges (times diam^2).
COLLINEAR_TOL = 1e-12
# Snap-to-vertex threshold for tangent queries (times diam).
VERTEX_SNAP_TOL = 1e-9


class GeometryError(ValueError):
    pass


def _as_points(vertices) -> np.ndarray:
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2:
        raise GeometryError(f"expected (n,2) vertex array, got shape {v.shape}")
    return v


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _canonicalize(v: np.ndarray) -> np.ndarray:
    """Orient CCW, drop duplicate and collinear consecutive vertices."""
    if len(v) < 3:
        raise GeometryError("polygon needs at least 3 vertices")
    if _signed_area(v) < 0:
        v = v[::-1]
    diam = float(np.max(np.ptp(v, axis=0)))
    if diam <= 0:
        raise GeometryError("degenerate polygon (zero diameter)")
    eps2 = COLLINEAR_TOL * diam * diam
    out = []
    n = len(v)
    for k in range(n):
        prev = out[-1] if out else v[k - 1]
        cur = v[k]
        nxt = v[(k + 1) % n]
        if np.hypot(*(cur - prev)) <= VERTEX_SNAP_TOL * diam and out:
            continue
        cross = (cur[0] - prev[0]) * (nxt[1] - cur[1]) - (cur[1] - prev[1]) * (nxt[0] - cur[0])
        if abs(cross) <= eps2:
            # collinear with neighbours: merged into the long edge
            continue
        out.append(cur)
    if len(out) < 3:
        raise GeometryError("polygon degenerates after canonicalization")
    w = np.array(out)
    # second pass for wrap-around collinearity introduced by removals
    keep = np.ones(len(w), bool)
    m = len(w)
    for k in range(m):
        a, b, c = w[k - 1], w[k], w[(k + 1) % m]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross <= eps2:
            if cross < -eps2 * 1e4:
                raise GeometryError("polygon is not convex")
            keep[k] = cross > eps2
    w = w[keep]
    if len(w) < 3 or _signed_area(w) <= 0:
        raise GeometryError("polygon degenerates after canonicalization")
    return w


@dataclass(frozen=True)
class ConvexPolygon:
    """Bounded convex domain as a CCW vertex list."""

    vertices: np.ndarray

    def __post_init__(self):
        v = _canonicalize(_as_points(self.vertices))
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    # -- basic measures ------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    def area(self) -> float:
        return _signed_area(self.vertices)

    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        a = 0.5 * cross.sum()
        cx = np.sum((v[:, 0] + w[:, 0]) * cross) / (6 * a)
        cy = np.sum((v[:, 1] + w[:, 1]) * cross) / (6 * a)
        return np.array([cx, cy])

    def diameter(self) -> float:
        v = self.vertices
        d2 = np.sum((v[None, :, :] - v[:, None, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))

    def second_moment(self) -> np.ndarray:
        """Covariance tensor of the uniform measure on the polygon."""
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        a = 0.5 * cross.sum()
        cx = np.sum((v[:, 0] + w[:, 0]) * cross) / (6 * a)
        cy = np.sum((v[:, 1] + w[:, 1]) * cross) / (6 * a)
        ixx = np.sum(cross * (v[:, 0] ** 2 + v[:, 0] * w[:, 0] + w[:, 0] ** 2)) / 12
        iyy = np.sum(cross * (v[:, 1] ** 2 + v[:, 1] * w[:, 1] + w[:, 1] ** 2)) / 12
        ixy = np.sum(cross * (2 * v[:, 0] * v[:, 1] + v[:, 0] * w[:, 1]
                              + w[:, 0] * v[:, 1] + 2 * w[:, 0] * w[:, 1])) / 24
        m = np.array([[ixx, ixy], [ixy, iyy]]) / a
        c = np.array([cx, cy])
        return m - np.outer(c, c)

    # -- predicates ----------------------------------------------------

    def contains(self, x, tol: float | None = None) -> bool:
        x = np.asarray(x, float)
        if tol is None:
            tol = REL_TOL * self.diameter()
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cross = (w[:, 0] - v[:, 0]) * (x[1] - v[:, 1]) - (w[:, 1] - v[:, 1]) * (x[0] - v[:, 0])
        return bool(np.all(cross >= -tol * np.hypot(w[:, 0] - v[:, 0], w[:, 1] - v[:, 1])))

    def contains_many(self, xs: np.ndarray, tol: float | None = None) -> np.ndarray:
        xs = np.asarray(xs, float)
        if tol is None:
            tol = REL_TOL * self.diameter()
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        e = w - v
        lens = np.hypot(e[:, 0], e[:, 1])
        cross = (e[None, :, 0] * (xs[:, None, 1] - v[None, :, 1])
                 - e[None, :, 1] * (xs[:, None, 0] - v[None, :, 0]))
        return np.all(cross >= -tol * lens[None, :], axis=1)

    def distance_to_boundary(self, x) -> float:
        """Signed distance to the boundary (positive inside)."""
        x = np.asarray(x, float)
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        e = w - v
        lens = np.hypot(e[:, 0], e[:, 1])
        # inward distance to each edge line
        d = (e[:, 0] * (x[1] - v[:, 1]) - e[:, 1] * (x[0] - v[:, 0])) / lens
        return float(d.min())

    # -- transforms ----------------------------------------------------

    def transform(self, amap: "AffineMap") -> "ConvexPolygon":
        return ConvexPolygon(amap.apply(self.vertices))

    def translate(self, t) -> "ConvexPolygon":
        return ConvexPolygon(self.vertices + np.asarray(t, float))

    def scale_about(self, center, factor: float) -> "ConvexPolygon":
        c = np.asarray(center, float)
        return ConvexPolygon(c + factor * (self.vertices - c))

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    # -- serialization ---------------------------------------------------

    def to_json(self) -> list:
        return [[float(x), float(y)] for x, y in self.vertices]

    @staticmethod
    def from_json(data) -> "ConvexPolygon":
        return ConvexPolygon(data)

    def __eq__(self, other):
        return isinstance(other, ConvexPolygon) and np.array_equal(self.vertices, other.vertices)


def area(poly: ConvexPolygon) -> float:
    return poly.area()


def clip_halfplane(poly: ConvexPolygon, normal, offset: float) -> ConvexPolygon | None:
    """Intersect ``poly`` with the half-plane ``{x . n <= c}``.

    Returns ``None`` when the intersection is empty or degenerate.
    """
    n = np.asarray(normal, float)
    v = poly.vertices
    s = v @ n - offset
    verts, _ = _clip_vertices(v, n, offset, s)
    if verts is None:
        return None
    try:
        return ConvexPolygon(verts)
    except GeometryError:
        return None


def _clip_vertices(v: np.ndarray, n: np.ndarray, c: float, s: np.ndarray):
    """Sutherland-Hodgman step on raw vertices; returns (verts, changed)."""
    if np.all(s <= 0):
        return v, False
    if np.all(s >= 0):
        return None, True
    out = []
    m = len(v)
    for k in range(m):
        a, b = v[k], v[(k + 1) % m]
        sa, sb = s[k], s[(k + 1) % m]
        if sa <= 0:
            out.append(a)
        if (sa < 0 < sb) or (sb < 0 < sa):
            t = sa / (sa - sb)
            out.append(a + t * (b - a))
    if len(out) < 3:
        return None, True
    return np.array(out), True


def polygon_intersection(p: ConvexPolygon, q: ConvexPolygon) -> ConvexPolygon | None:
    """Intersection of two convex polygons (possibly empty)."""
    v = p.vertices
    qv = q.vertices
    qw = np.roll(qv, -1, axis=0)
    for a, b in zip(qv, qw):
        e = b - a
        n = np.array([e[1], -e[0]])  # outward normal for CCW q
        s = v @ n - n @ a
        v, _ = _clip_vertices(v, n, n @ a, s)
        if v is None:
            return None
    try:
        return ConvexPolygon(v)
    except GeometryError:
        return None


def angle(v1, v2) -> float:
    """Angle between two nonzero vectors, in [0, pi]."""
    v1 = np.asarray(v1, float)
    v2 = np.asarray(v2, float)
    n1 = np.hypot(*v1)
    n2 = np.hypot(*v2)
    if n1 == 0 or n2 == 0:
        raise GeometryError("angle of zero vector")
    c = np.clip(np.dot(v1, v2) / (n1 * n2), -1.0, 1.0)
    return float(np.arccos(c))


@dataclass(frozen=True)
class Ellipse:
    """Ellipse with semi-axis lengths semi_short <= semi_long."""

    center: np.ndarray
    semi_short: float
    semi_long: float
    e_long: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.center, float).copy()
        e = np.asarray(self.e_long, float).copy()
        ne = np.hypot(*e)
        if ne == 0:
            raise GeometryError("zero long-axis direction")
        e /= ne
        if not (0 < self.semi_short <= self.semi_long * (1 + 1e-12)):
            raise GeometryError("require 0 < semi_short <= semi_long")
        c.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "e_long", e)
        object.__setattr__(self, "semi_short", float(self.semi_short))
        object.__setattr__(self, "semi_long", float(self.semi_long))

    @property
    def e_short(self) -> np.ndarray:
        return np.array([-self.e_long[1], self.e_long[0]])

    def area(self) -> float:
        return np.pi * self.semi_short * self.semi_long

    def norm_of(self, x) -> float:
        """Gauge of x: <=1 iff x inside the ellipse."""
        d = np.asarray(x, float) - self.center
        a = d @ self.e_long
        b = d @ self.e_short
        return float(np.hypot(a / self.semi_long, b / self.semi_short))

    def norms_of(self, xs: np.ndarray) -> np.ndarray:
        d = np.asarray(xs, float) - self.center
        a = d @ self.e_long
        b = d @ self.e_short
        return np.hypot(a / self.semi_long, b / self.semi_short)

    def scaled(self, factor: float) -> "Ellipse":
        return Ellipse(self.center, self.semi_short * factor, self.semi_long * factor, self.e_long)

    def with_area(self, target_area: float) -> "Ellipse":
        return self.scaled(np.sqrt(target_area / self.area()))

    def boundary_points(self, k: int = 64) -> np.ndarray:
        t = np.linspace(0, 2 * np.pi, k, endpoint=False)
        pts = (np.outer(np.cos(t), self.semi_long * self.e_long)
               + np.outer(np.sin(t), self.semi_short * self.e_short))
        return self.center + pts

    def to_json(self) -> dict:
        return {
            "center": [float(self.center[0]), float(self.center[1])],
            "semi_short": self.semi_short,
            "semi_long": self.semi_long,
            "e_long": [float(self.e_long[0]), float(self.e_long[1])],
        }

    @staticmethod
    def from_json(d) -> "Ellipse":
        return Ellipse(d["center"], d["semi_short"], d["semi_long"], d["e_long"])


def eccentricity(e: Ellipse) -> float:
    """Long-to-short axis ratio, >= 1."""
    return e.semi_long / e.semi_short


def perp(e: Ellipse) -> Ellipse:
    """Perpendicular ellipse: same axis lengths, axes swapped."""
    return Ellipse(e.center, e.semi_short, e.semi_long, e.e_short)


def fit_ellipse(poly: ConvexPolygon, target_area: float) -> Ellipse:
    """Moment-tensor ellipse of a polygon, scaled to a prescribed area.

    Centered at the centroid, axes along the principal axes of the
    covariance of the uniform measure, axis ratio the square root of
    the covariance eigenvalue ratio.  Equivariant under unimodular
    affine maps.
    """
    if target_area <= 0:
        raise GeometryError("target_area must be positive")
    cov = poly.second_moment()
    evals, evecs = np.linalg.eigh(cov)
    if evals[0] <= 0:
        raise GeometryError("degenerate polygon covariance")
    s_small, s_big = evals
    r0 = np.sqrt(target_area / np.pi)
    ratio4 = (s_big / s_small) ** 0.25
    return Ellipse(poly.centroid(), r0 / ratio4, r0 * ratio4, evecs[:, 1])


@dataclass(frozen=True)
class AffineMap:
    """x -> linear @ x + translation."""

    linear: np.ndarray
    translation: np.ndarray = field(default_factory=lambda: np.zeros(2))
    unimodular: bool = False

    def __post_init__(self):
        lin = np.asarray(self.linear, float).copy()
        tr = np.asarray(self.translation, float).copy()
        det = np.linalg.det(lin)
        if abs(det) < 1e-300:
            raise GeometryError("singular linear part")
        if self.unimodular and abs(det - 1.0) > 1e-9:
            raise GeometryError(f"map flagged unimodular but det={det}")
        lin.flags.writeable = False
        tr.flags.writeable = False
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", tr)

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        return x @ self.linear.T + self.translation

    def apply_ellipse(self, e: Ellipse) -> Ellipse:
        m = np.column_stack([e.semi_long * e.e_long, e.semi_short * e.e_short])
        u, s, _ = np.linalg.svd(self.linear @ m)
        return Ellipse(self.apply(e.center), s[1], s[0], u[:, 0])

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other: x -> self(other(x))."""
        return AffineMap(self.linear @ other.linear,
                         self.linear @ other.translation + self.translation,
                         unimodular=self.unimodular and other.unimodular)

    def inverse(self) -> "AffineMap":
        inv = np.linalg.inv(self.linear)
        return AffineMap(inv, -inv @ self.translation, unimodular=self.unimodular)

    def op_norm(self) -> float:
        return float(np.linalg.norm(self.linear, 2))

    @staticmethod
    def identity() -> "AffineMap":
        return AffineMap(np.eye(2), np.zeros(2), unimodular=True)

    @staticmethod
    def rotation(theta: float, center=(0.0, 0.0)) -> "AffineMap":
        c, s = np.cos(theta), np.sin(theta)
        lin = np.array([[c, -s], [s, c]])
        ctr = np.asarray(center, float)
        return AffineMap(lin, ctr - lin @ ctr, unimodular=True)


def normalizing_map(e: Ellipse) -> AffineMap:
    """Unimodular map sending the ellipse to the origin-centered disk of
    equal area.  Its squared operator norm equals the eccentricity."""
    r = np.sqrt(e.semi_short * e.semi_long)
    u = np.column_stack([e.e_long, e.e_short])
    lin = u @ np.diag([r / e.semi_long, r / e.semi_short]) @ u.T
    return AffineMap(lin, -lin @ e.center, unimodular=True)


@dataclass(frozen=True)
class Ray:
    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.origin, float).copy()
        d = np.asarray(self.direction, float).copy()
        nd = np.hypot(*d)
        if nd == 0:
            raise GeometryError("zero ray direction")
        d /= nd
        o.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "direction", d)


@dataclass(frozen=True)
class Cone:
    """Open cone of directions within angle ``opening`` of ``direction``."""

    apex: np.ndarray
    direction: np.ndarray
    opening: float

    def __post_init__(self):
        a = np.asarray(self.apex, float).copy()
        d = np.asarray(self.direction, float).copy()
        nd = np.hypot(*d)
        if nd == 0:
            raise GeometryError("zero cone direction")
        if not 0 <= self.opening <= np.pi:
            raise GeometryError("opening must lie in [0, pi]")
        d /= nd
        a.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "apex", a)
        object.__setattr__(self, "direction", d)

    def contains(self, x) -> bool:
        v = np.asarray(x, float) - self.apex
        if np.hypot(*v) == 0:
            return False
        return angle(v, self.direction) < self.opening


def _locate_on_boundary(poly: ConvexPolygon, x0) -> tuple[int, float]:
    """Locate x0 on the boundary: returns (edge index k, parameter t).

    t in [0,1] along edge k; snaps to vertices within tolerance.
    Raises if x0 is not within tolerance of the boundary.
    """
    x0 = np.asarray(x0, float)
    diam = poly.diameter()
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    best = (None, None, np.inf)
    for k in range(len(v)):
        e = w[k] - v[k]
        ll = e @ e
        t = np.clip((x0 - v[k]) @ e / ll, 0.0, 1.0)
        proj = v[k] + t * e
        d = np.hypot(*(x0 - proj))
        if d < best[2]:
            best = (k, float(t), d)
    k, t, d = best
    if d > 1e-7 * diam:
        raise GeometryError(f"point {x0} is not on the polygon boundary (dist {d:.3g})")
    snap = VERTEX_SNAP_TOL * diam
    elen = np.hypot(*(w[k] - v[k]))
    if t * elen <= snap:
        t = 0.0
    elif (1 - t) * elen <= snap:
        k = (k + 1) % len(v)
        t = 0.0
    return k, t


def right_tangent(poly: ConvexPolygon, x0) -> Ray:
    """Supporting ray at x0 in the CCW (outgoing) boundary direction."""
    k, t = _locate_on_boundary(poly, x0)
    v = poly.vertices
    d = v[(k + 1) % len(v)] - v[k]
    return Ray(np.asarray(x0, float), d)


def left_tangent(poly: ConvexPolygon, x0) -> Ray:
    """Supporting ray at x0 in the CW (incoming, reversed) direction."""
    k, t = _locate_on_boundary(poly, x0)
    v = poly.vertices
    if t == 0.0:
        d = v[k - 1] - v[k]
    else:
        d = v[k] - v[(k + 1) % len(v)]
    return Ray(np.asarray(x0, float), d)


def boundary_point(poly: ConvexPolygon, s: float) -> np.ndarray:
    """Point on the boundary at arc-length fraction s in [0,1), CCW."""
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    lens = np.hypot(*(w - v).T)
    total = lens.sum()
    target = (s % 1.0) * total
    acc = 0.0
    for k in range(len(v)):
        if acc + lens[k] >= target:
            t = (target - acc) / lens[k]
            return v[k] + t * (w[k] - v[k])
        acc += lens[k]
    return v[0].copy()


def perimeter(poly: ConvexPolygon) -> float:
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    return float(np.hypot(*(w - v).T).sum())


def arc_position(poly: ConvexPolygon, x) -> float:
    """Arc-length fraction in [0,1) of a boundary point, CCW from vertex 0."""
    k, t = _locate_on_boundary(poly, x)
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    lens = np.hypot(*(w - v).T)
    return float((lens[:k].sum() + t * lens[k]) / lens.sum())


def inward_normal(poly: ConvexPolygon, x) -> np.ndarray:
    """Unit inward normal at a boundary point (edge normal; at a vertex,
    the normal of the outgoing edge)."""
    k, t = _locate_on_boundary(poly, x)
    v = poly.vertices
    e = v[(k + 1) % len(v)] - v[k]
    n = np.array([-e[1], e[0]])
    return n / np.hypot(*n)


def project_to_boundary(poly: ConvexPolygon, x) -> tuple[np.ndarray, float]:
    """Closest boundary point and its distance."""
    x = np.asarray(x, float)
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    best_p, best_d = None, np.inf
    for k in range(len(v)):
        e = w[k] - v[k]
        t = np.clip((x - v[k]) @ e / (e @ e), 0.0, 1.0)
        p = v[k] + t * e
        d = np.hypot(*(x - p))
        if d < best_d:
            best_p, best_d = p, d
    return best_p, float(best_d)


def polygon_to_json_str(poly: ConvexPolygon) -> str:
    return json.dumps(poly.to_json())
