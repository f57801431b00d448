"""Analytical measurements on a solved potential.

Sections and centred sections of the PL potential, fitted ellipses and
eccentricity curves, renormalizations, engulfing and volume ratios,
local Hessian estimates, boundary tangent obliqueness and growth
exponents.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import HalfspaceIntersection, QhullError

from .geometry import (AffineMap, ConvexPolygon, Ellipse, GeometryError,
                       eccentricity, fit_ellipse, left_tangent, normalizing_map,
                       polygon_intersection, project_to_boundary, right_tangent)
from .solver import PLConvexPotential

CENTRING_TOL = 1e-6
CENTRING_MAX_ITER = 200
CENTRING_TAU = 0.5
SECTION_CLIP_THRESHOLD = 400


class AnalysisError(RuntimeError):
    pass


class CentringError(AnalysisError):
    pass


@dataclass(frozen=True)
class Section:
    """Sublevel set {psi < psi(x0) + p.(x - x0) + h} as a polygon."""

    polygon: ConvexPolygon
    x0: np.ndarray
    slope: np.ndarray
    height: float
    centred: bool = False
    centring_residual: float = np.nan

    def volume(self) -> float:
        return self.polygon.area()


def _default_box(domain: ConvexPolygon) -> ConvexPolygon:
    return domain.scale_about(domain.centroid(), 2.0)


def _halfplane_polygon(normals, offsets, box: ConvexPolygon, interior):
    """Intersection of {x.n_i <= c_i} with a bounding box polygon."""
    bv = box.vertices
    # prune constraints that do not cut the box
    if len(normals):
        slack = bv @ normals.T - offsets
        keep = slack.max(axis=0) > 0
        normals = normals[keep]
        offsets = offsets[keep]
    if len(normals) == 0:
        return box
    if len(normals) <= SECTION_CLIP_THRESHOLD:
        return _clip_iterative(box, normals, offsets)
    be = np.roll(bv, -1, axis=0) - bv
    bn = np.column_stack([be[:, 1], -be[:, 0]])
    bn /= np.hypot(bn[:, 0], bn[:, 1])[:, None]
    bo = np.sum(bn * bv, axis=1)
    hn = np.vstack([normals, bn])
    ho = np.concatenate([offsets, bo])
    hs = np.column_stack([hn, -ho])
    try:
        hsi = HalfspaceIntersection(hs, np.asarray(interior, float))
        pts = hsi.intersections
        c = pts.mean(axis=0)
        order = np.argsort(np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0]))
        return ConvexPolygon(pts[order])
    except (QhullError, GeometryError):
        return _clip_iterative(box, normals, offsets)


def _clip_iterative(box: ConvexPolygon, normals, offsets) -> ConvexPolygon:
    from .geometry import _clip_vertices
    v = box.vertices
    for n, c in zip(normals, offsets):
        s = v @ n - c
        v, _ = _clip_vertices(v, n, c, s)
        if v is None:
            raise AnalysisError("section is empty")
    try:
        return ConvexPolygon(v)
    except GeometryError as e:
        raise AnalysisError(f"degenerate section: {e}")


def section(psi: PLConvexPotential, x0, p, h: float,
            clip_box: ConvexPolygon | None = None) -> Section:
    """Exact section polygon of the PL potential."""
    if h <= 0:
        raise AnalysisError("section height must be positive")
    x0 = np.asarray(x0, float)
    p = np.asarray(p, float)
    box = clip_box if clip_box is not None else _default_box(psi.domain)
    cap = psi.eval(x0) - p @ x0 + h
    normals = psi.slopes - p
    offsets = psi.intercepts + cap
    poly = _halfplane_polygon(normals, offsets, box, x0)
    return Section(poly, x0, p, float(h))


def _box_around(poly: ConvexPolygon, center, factor: float) -> ConvexPolygon:
    c = np.asarray(center, float)
    v = c + factor * (poly.vertices - c)
    lo, hi = v.min(axis=0), v.max(axis=0)
    return ConvexPolygon([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])


def _touches(poly: ConvexPolygon, box: ConvexPolygon, tol: float) -> bool:
    bv = box.vertices
    be = np.roll(bv, -1, axis=0) - bv
    bn = np.column_stack([be[:, 1], -be[:, 0]])
    bn /= np.hypot(bn[:, 0], bn[:, 1])[:, None]
    bo = np.sum(bn * bv, axis=1)
    slack = bo - poly.vertices @ bn.T
    return bool(slack.min() < tol)


def centred_section(psi: PLConvexPotential, x0, h: float,
                    tol: float = CENTRING_TOL,
                    max_iter: int = CENTRING_MAX_ITER,
                    tau: float = CENTRING_TAU,
                    initial_slope=None) -> Section:
    """Section whose slope is tuned so the centre of mass is x0.

    Damped fixed-point iteration on the slope, preconditioned by the
    section's covariance (for a quadratic the preconditioned update is
    exact Newton).
    """
    x0 = np.asarray(x0, float)
    p = np.asarray(initial_slope, float) if initial_slope is not None \
        else psi.gradient(x0)
    full_box = _default_box(psi.domain)
    box = full_box
    box_tol = 1e-9 * full_box.diameter()
    sec = None
    for it in range(max_iter):
        sec = section(psi, x0, p, h, clip_box=box)
        if box is not full_box and _touches(sec.polygon, box, box_tol):
            box = full_box
            sec = section(psi, x0, p, h, clip_box=box)
        poly = sec.polygon
        c = poly.centroid()
        diam = poly.diameter()
        resid = float(np.hypot(*(x0 - c)))
        if resid <= tol * diam:
            return Section(poly, x0, p, float(h), centred=True,
                           centring_residual=resid / diam)
        cov = poly.second_moment()
        try:
            step = np.linalg.solve(cov, x0 - c)
        except np.linalg.LinAlgError:
            raise CentringError("singular section covariance")
        p = p + tau * (h / 2.0) * step
        # shrink the working box around the current section
        box = _box_around(poly, c, 3.0)
        box = polygon_intersection(box, full_box) or full_box
    raise CentringError(
        f"centred section did not converge at h={h:g} (residual {resid:.3g})")


# ---------------------------------------------------------------------------
# eccentricity curves


@dataclass(frozen=True)
class EccSample:
    h: float
    eta: float
    ellipse: Ellipse
    vol_ratio_in: float
    vol_ratio_full: float
    centring_residual: float


@dataclass(frozen=True)
class EccentricityCurve:
    x0: np.ndarray
    samples: list[EccSample] = field(default_factory=list)
    skipped: list[float] = field(default_factory=list)

    def h_values(self) -> np.ndarray:
        return np.array([s.h for s in self.samples])

    def eta_values(self) -> np.ndarray:
        return np.array([s.eta for s in self.samples])


def eccentricity_curve(psi: PLConvexPotential, x0, h_max: float, h_min: float,
                       samples_per_decade: int = 8, min_cells: int = 20,
                       diameter_floor_cells: float = 5.0) -> EccentricityCurve:
    """Sample h -> eccentricity of the fitted section ellipse.

    Stops at the discretization floor: when the section holds fewer
    than ``min_cells`` power cells or its diameter drops below
    ``diameter_floor_cells`` local cell sizes.
    """
    if not (0 < h_min < h_max):
        raise AnalysisError("need 0 < h_min < h_max")
    x0 = np.asarray(x0, float)
    cell_area = psi.domain.area() / psi.n_pieces
    cell_size = np.sqrt(cell_area)
    n_steps = int(np.ceil(np.log10(h_max / h_min) * samples_per_decade)) + 1
    hs = np.geomspace(h_max, h_min, n_steps)
    samples = []
    skipped = []
    p_warm = None
    for h in hs:
        try:
            sec = centred_section(psi, x0, h, initial_slope=p_warm)
        except (AnalysisError, GeometryError):
            skipped.append(float(h))
            continue
        p_warm = sec.slope
        poly = sec.polygon
        inter = polygon_intersection(poly, psi.domain)
        area_in = inter.area() if inter is not None else 0.0
        if area_in / cell_area < min_cells:
            break
        if poly.diameter() < diameter_floor_cells * cell_size:
            break
        ell = fit_ellipse(poly, h)
        samples.append(EccSample(float(h), eccentricity(ell), ell,
                                 area_in / h, poly.area() / h,
                                 sec.centring_residual))
    return EccentricityCurve(x0, samples, skipped)


# ---------------------------------------------------------------------------
# renormalization


@dataclass(frozen=True)
class NormalizedPair:
    """Renormalized pair (u, v) with domains and the measured
    comparability constant."""

    u: PLConvexPotential
    v: PLConvexPotential
    omega1: ConvexPolygon
    omega2: ConvexPolygon
    normalizer: AffineMap          # unimodular A with |A|^2 = eta(E_h)
    height: float
    base_point: np.ndarray
    base_slope: np.ndarray
    delta_bar: float = np.nan


def renormalize(psi: PLConvexPotential, phi: PLConvexPotential,
                target_domain: ConvexPolygon, x0, h: float,
                ellipse: Ellipse | None = None,
                measure_delta: bool = False,
                delta_h_grid=(1.0, 0.5, 0.25, 0.125)) -> NormalizedPair:
    """Unimodular rescaling of the pair so the h-section at x0 becomes
    a unit-scale section at the origin.

    Closed-form on the PL representation: affine images of max-affine
    functions are max-affine.
    """
    x0 = np.asarray(x0, float)
    if ellipse is None:
        sec = centred_section(psi, x0, h)
        ellipse = fit_ellipse(sec.polygon, np.pi * h)
    else:
        ellipse = ellipse.with_area(np.pi * h)
    amap = normalizing_map(ellipse)
    a = amap.linear
    ainv = np.linalg.inv(a)
    g = psi.gradient(x0)
    sh = np.sqrt(h)

    u_slopes = (psi.slopes - g) @ ainv / sh
    u_inter = (psi.intercepts - psi.slopes @ x0 + psi.eval(x0)) / h
    omega1 = ConvexPolygon((psi.domain.vertices - x0) @ a.T / sh)
    u = PLConvexPotential(u_slopes, u_inter, omega1)

    v_slopes = (phi.slopes - x0) @ a.T / sh
    v_inter = (phi.intercepts - phi.slopes @ g + phi.eval(g)) / h
    omega2 = ConvexPolygon((target_domain.vertices - g) @ ainv / sh)
    v = PLConvexPotential(v_slopes, v_inter, omega2)

    delta_bar = np.nan
    if measure_delta:
        delta_bar = measure_delta_bar(u, omega1, delta_h_grid)
    return NormalizedPair(u, v, omega1, omega2, amap, float(h), x0, g, delta_bar)


def chebyshev_center(poly: ConvexPolygon) -> tuple[np.ndarray, float]:
    """Center and radius of the largest inscribed disk."""
    v = poly.vertices
    e = np.roll(v, -1, axis=0) - v
    n = np.column_stack([e[:, 1], -e[:, 0]])
    n /= np.hypot(n[:, 0], n[:, 1])[:, None]
    c = np.sum(n * v, axis=1)
    res = linprog(c=[0, 0, -1], A_ub=np.column_stack([n, np.ones(len(n))]),
                  b_ub=c, bounds=[(None, None)] * 2 + [(0, None)],
                  method="highs")
    if not res.success:
        raise AnalysisError("chebyshev center LP failed")
    return res.x[:2], float(res.x[2])


def measure_delta_bar(u: PLConvexPotential, omega1: ConvexPolygon,
                      h_grid=(1.0, 0.5, 0.25, 0.125)) -> float:
    """Largest constant for which the two-sided ellipse inclusions of
    the normalized family hold over the h grid."""
    origin = np.zeros(2)
    best = np.inf
    for h in h_grid:
        try:
            sec = centred_section(u, origin, h)
        except AnalysisError:
            continue
        ell = fit_ellipse(sec.polygon, np.pi * h)
        ell0 = Ellipse(origin, ell.semi_short, ell.semi_long, ell.e_long)
        outer = float(ell0.norms_of(sec.polygon.vertices).max())
        inter = polygon_intersection(sec.polygon, omega1)
        if inter is None:
            return 0.0
        # largest translated copy of ell0 inside the intersection,
        # measured in the ellipse's own coordinates
        m = normalizing_map(ell0)
        r_unit = np.sqrt(ell0.semi_short * ell0.semi_long)
        mapped = inter.transform(m)
        _, rad = chebyshev_center(mapped)
        inner = rad / r_unit
        best = min(best, inner, 1.0 / outer)
    return float(best) if np.isfinite(best) else 0.0


# ---------------------------------------------------------------------------
# engulfing


def check_engulfing(psi: PLConvexPotential, x0, x1, h: float,
                    t: float, t_bar: float, steps: int = 12) -> float:
    """Empirical largest s with S_{sh}(x1) inside the t_bar-dilation of
    S_h(x0); bisection on s."""
    x0 = np.asarray(x0, float)
    x1 = np.asarray(x1, float)
    s0 = centred_section(psi, x0, h)
    dil_small = s0.polygon.scale_about(x0, t) if t > 0 else None
    if t > 0:
        if not dil_small.contains(x1, tol=1e-9 * dil_small.diameter()):
            raise AnalysisError("x1 is not inside the t-dilation of the section")
    elif np.hypot(*(x1 - x0)) > 1e-9 * s0.polygon.diameter():
        raise AnalysisError("t=0 requires x1 == x0")
    outer = s0.polygon.scale_about(x0, t_bar)
    tol = 1e-9 * outer.diameter()

    def inside(s: float) -> bool:
        try:
            s1 = centred_section(psi, x1, s * h)
        except AnalysisError:
            return False
        return bool(np.all(outer.contains_many(s1.polygon.vertices, tol=1e-7)))

    if inside(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# Hessian and W^{2,p}


def hessian_estimate(f, x, r: float, stencil: int = 7,
                     domain: ConvexPolygon | None = None,
                     min_r: float = 0.0) -> tuple[np.ndarray, float]:
    """Least-squares quadratic fit of f on a stencil inside B_r(x).

    Returns the fitted (symmetric) Hessian and the rms fit residual.
    Exact on global quadratics.  ``f`` is a PLConvexPotential or any
    callable mapping (m,2) points to values.
    """
    x = np.asarray(x, float)
    if r <= 0 or r < min_r:
        raise AnalysisError("stencil radius below resolution floor")
    dom = domain if domain is not None else getattr(f, "domain", None)
    if dom is not None and dom.distance_to_boundary(x) < r * (1 - 1e-9):
        raise AnalysisError("stencil disk not contained in the domain")
    half = r / np.sqrt(2.0)
    g = np.linspace(-half, half, stencil)
    gx, gy = np.meshgrid(g, g)
    pts = np.column_stack([gx.ravel(), gy.ravel()]) + x
    if hasattr(f, "eval_many"):
        vals = f.eval_many(pts)
    else:
        vals = np.asarray(f(pts), float)
    xi = (pts - x) / r
    design = np.column_stack([np.ones(len(xi)), xi[:, 0], xi[:, 1],
                              xi[:, 0] ** 2, xi[:, 0] * xi[:, 1], xi[:, 1] ** 2])
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    hess = np.array([[2 * coef[3], coef[4]], [coef[4], 2 * coef[5]]]) / r ** 2
    resid = float(np.sqrt(np.mean((design @ coef - vals) ** 2)))
    return hess, resid


def spectral_norm_2x2(h: np.ndarray) -> float:
    tr = 0.5 * (h[0, 0] + h[1, 1])
    dd = np.sqrt(max(0.25 * (h[0, 0] - h[1, 1]) ** 2 + h[0, 1] * h[1, 0], 0.0))
    return float(max(abs(tr + dd), abs(tr - dd)))


def w2p_norm(f, domain: ConvexPolygon, p: float, mesh_size: float | None = None,
             collar: float | None = None, r_max: float | None = None,
             cell_size: float = 0.0) -> tuple[float, float]:
    """Quadrature of |D^2 f|^p over an interior mesh.

    Returns (integral^(1/p) ... no: the raw integral value, excluded
    collar area).  The stencil radius is dist/2 capped at r_max.
    """
    if p <= 0:
        raise AnalysisError("p must be positive")
    diam = domain.diameter()
    if collar is None:
        collar = 3.0 * cell_size
    if mesh_size is None:
        mesh_size = max(diam / 60.0, 1.5 * cell_size)
    if r_max is None:
        r_max = diam / 8.0
    lo, hi = domain.bounding_box()
    nx = max(2, int(np.ceil((hi[0] - lo[0]) / mesh_size)))
    ny = max(2, int(np.ceil((hi[1] - lo[1]) / mesh_size)))
    gx = lo[0] + (np.arange(nx) + 0.5) * (hi[0] - lo[0]) / nx
    gy = lo[1] + (np.arange(ny) + 0.5) * (hi[1] - lo[1]) / ny
    cellw = ((hi[0] - lo[0]) / nx) * ((hi[1] - lo[1]) / ny)
    total = 0.0
    covered = 0.0
    for xv in gx:
        for yv in gy:
            pt = np.array([xv, yv])
            d = domain.distance_to_boundary(pt)
            if d <= collar or d <= 0:
                continue
            r = min(0.5 * d, r_max)
            try:
                hess, _ = hessian_estimate(f, pt, r, domain=domain)
            except AnalysisError:
                continue
            total += spectral_norm_2x2(hess) ** p * cellw
            covered += cellw
    excluded = max(domain.area() - covered, 0.0)
    return total, excluded


# ---------------------------------------------------------------------------
# obliqueness


def _nearest_edge(poly: ConvexPolygon, x) -> int:
    """Index of the boundary edge closest to x (edge k runs from vertex
    k to vertex k+1)."""
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    best, best_d = 0, np.inf
    for k in range(len(v)):
        e = w[k] - v[k]
        t = np.clip((x - v[k]) @ e / (e @ e), 0.0, 1.0)
        d = np.hypot(*(x - v[k] - t * e))
        if d < best_d:
            best, best_d = k, d
    return best


def obliqueness_check(source: ConvexPolygon, target: ConvexPolygon,
                      psi: PLConvexPotential, x0,
                      probe_cells=(1.5, 3.0, 4.5, 6.0, 8.0, 10.0),
                      ambiguity_cells: float = 3.0,
                      boundary_tol: float | None = None) -> dict:
    """Inner products of matched tangent rays at a boundary point and
    its image point on the target boundary.

    The image feature (target edge or vertex) is classified from a
    stencil of boundary probes on each side of x0: each probe's
    gradient is projected to the target boundary and assigned to an
    edge unless it falls within ``ambiguity_cells`` local cell sizes of
    a target vertex.  When the two sides see different edges, the
    crossing is pinned at a source vertex inside the probe window (the
    boundary map's speed breaks at corners) or else at the midpoint of
    the ambiguous gap, and x0's side of it selects the feature.
    One-sided tangents at the classified feature give the matching.
    """
    from .geometry import arc_position, boundary_point, inward_normal, perimeter
    x0 = np.asarray(x0, float)
    n_pieces = psi.n_pieces
    cell = np.sqrt(source.area() / n_pieces)
    tcell = np.sqrt(target.area() / n_pieces)
    if boundary_tol is None:
        boundary_tol = 6.0 * tcell
    l1 = left_tangent(source, x0)
    r1 = right_tangent(source, x0)
    per = perimeter(source)
    s0 = arc_position(source, x0)
    tv = target.vertices
    m = len(tv)

    def classify(offset_cells: float):
        """(edge index or None, nearest vertex index, projection dist)."""
        q = boundary_point(source, (s0 + offset_cells * cell / per) % 1.0)
        y = psi.gradient(q + 0.5 * cell * inward_normal(source, q))
        proj, d = project_to_boundary(target, y)
        vk = int(np.argmin(np.hypot(*(tv - proj).T)))
        if np.hypot(*(tv[vk] - proj)) < ambiguity_cells * tcell:
            return None, vk, d
        return _nearest_edge(target, proj), vk, d

    left = [classify(-k) for k in probe_cells]
    right = [classify(+k) for k in probe_cells]
    y_ctr = psi.gradient(x0 + 0.75 * cell * inward_normal(source, x0))
    proj_c, dist_c = project_to_boundary(target, y_ctr)
    dists = [d for _, _, d in left + right] + [dist_c]

    def innermost_edge(side):
        for k, (e, _, _) in zip(probe_cells, side):
            if e is not None:
                return e, k
        return None, None

    e_l, k_l = innermost_edge(left)
    e_r, k_r = innermost_edge(right)
    amb_verts = [v for e, v, _ in left + right if e is None]
    v_amb = max(set(amb_verts), key=amb_verts.count) if amb_verts else None

    feature = None          # ("edge", k) or ("vertex", k)
    if e_l is None and e_r is None:
        feature = ("vertex", v_amb if v_amb is not None
                   else int(np.argmin(np.hypot(*(tv - proj_c).T))))
    elif e_l is None or e_r is None:
        feature = ("vertex", v_amb)
    elif e_l == e_r:
        feature = ("edge", e_l)
    else:
        # transversal crossing between two edges; shared vertex
        if (e_r - e_l) % m <= 2:
            vx = (e_l + 1) % m if (e_r - e_l) % m == 1 else (e_l + 2) % m
        else:
            vx = int(np.argmin(np.hypot(*(tv - proj_c).T)))
        # crossing offset along the source boundary, in cell units
        sv = source.vertices
        svarc = np.array([arc_position(source, p) for p in sv])
        rel = (svarc - s0 + 0.5) % 1.0 - 0.5    # signed fraction
        rel_cells = rel * per / cell
        window = np.abs(rel_cells) <= probe_cells[-1]
        if window.any():
            c_star = rel_cells[np.abs(np.where(window, rel_cells, np.inf)).argmin()]
        else:
            c_star = 0.5 * (k_r - k_l)
        if c_star > 0.75:
            feature = ("edge", e_l)
        elif c_star < -0.75:
            feature = ("edge", e_r)
        else:
            feature = ("vertex", vx)

    if feature[0] == "vertex":
        y0 = tv[feature[1]].copy()
        l2 = left_tangent(target, y0).direction
        r2 = right_tangent(target, y0).direction
    else:
        k = feature[1]
        d = tv[(k + 1) % m] - tv[k]
        d = d / np.hypot(*d)
        l2, r2 = -d, d
        y0 = proj_c
    ldot = float(l1.direction @ l2)
    rdot = float(r1.direction @ r2)
    return {
        "x0": x0,
        "y0": y0, "feature": feature,
        "LdotL": ldot, "RdotR": rdot,
        "margin": min(ldot, rdot),
        "angle_left": float(np.arccos(np.clip(ldot, -1, 1))),
        "angle_right": float(np.arccos(np.clip(rdot, -1, 1))),
        "boundary_dist": float(max(dists)),
        "under_resolved": bool(max(dists) > boundary_tol),
    }


# ---------------------------------------------------------------------------
# growth exponents


def corner_growth(psi: PLConvexPotential, x0, direction, s_grid,
                  value_floor: float | None = None) -> tuple[float, np.ndarray, np.ndarray]:
    """Fitted log-log growth exponent of the potential above its
    supporting line along a ray from a boundary point."""
    x0 = np.asarray(x0, float)
    e = np.asarray(direction, float)
    e = e / np.hypot(*e)
    s = np.asarray(s_grid, float)
    if np.any(s <= 0):
        raise AnalysisError("s_grid must be positive")
    probe = x0 + (s.min() / 4.0) * e
    g = psi.gradient(probe)
    base = psi.eval(x0)
    vals = psi.eval_many(x0 + np.outer(s, e)) - base - s * (g @ e)
    if value_floor is None:
        value_floor = 1e-9 * (np.abs(vals).max() + 1.0)
    keep = vals > value_floor
    if keep.sum() < 3:
        raise AnalysisError("not enough resolvable samples for the growth fit")
    slope, _ = np.polyfit(np.log(s[keep]), np.log(vals[keep]), 1)
    return float(slope), s[keep], vals[keep]


def fit_loglog(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log y against log x."""
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def bootstrap_slope_ci(x: np.ndarray, y: np.ndarray, n_boot: int = 200,
                       seed: int = 0, level: float = 0.95) -> tuple[float, float]:
    """Percentile bootstrap confidence interval for the log-log slope."""
    rng = np.random.default_rng(seed)
    n = len(x)
    slopes = []
    for _ in range(n_boot):
        idx = rng.integers(0, n, n)
        if len(np.unique(x[idx])) < 2:
            continue
        slopes.append(fit_loglog(x[idx], y[idx]))
    lo = (1 - level) / 2
    return (float(np.quantile(slopes, lo)), float(np.quantile(slopes, 1 - lo)))
