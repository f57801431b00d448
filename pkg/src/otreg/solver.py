"""Semi-discrete optimal transport between uniform measures on convex
polygons.

Source measure: uniform on a convex polygon U1.  Target measure: a
weighted point cloud inside U2.  A damped Newton iteration on the
Kantorovich dual weights drives each power cell's area to its target
mass; the Brenier potential is the max-of-affine function
``psi(x) = max_i (x . y_i - c_i)`` with ``c_i = (|y_i|^2 - w_i) / 2``.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve
from scipy.spatial import ConvexHull, QhullError, cKDTree

from . import kernels
from .geometry import ConvexPolygon, GeometryError, fit_ellipse

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 100
LLOYD_ITERS = 30
MAX_DOMAIN_ECCENTRICITY = 1e6


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class TargetCloud:
    """Discretized target measure: points in U2 with positive masses."""

    points: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=float)
        m = np.asarray(self.masses, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) != len(m):
            raise SolverError("points must be (n,2) with matching masses")
        if not np.all(np.isfinite(pts)) or not np.all(m > 0):
            raise SolverError("masses must be positive and points finite")
        pts.flags.writeable = False
        m.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", m)

    @property
    def n(self) -> int:
        return len(self.points)

    def total_mass(self) -> float:
        return float(self.masses.sum())


@dataclass(frozen=True)
class DualWeights:
    """Kantorovich dual variables, gauge-fixed to sum zero."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, float) .copy()
        if not np.all(np.isfinite(w)):
            raise SolverError("weights must be finite")
        w -= w.mean()
        w.flags.writeable = False
        object.__setattr__(self, "w", w)


class PLConvexPotential:
    """Convex PL function psi(x) = max_i (x . slopes[i] - intercepts[i])."""

    def __init__(self, slopes, intercepts, domain: ConvexPolygon):
        self.slopes = np.ascontiguousarray(slopes, float)
        self.intercepts = np.ascontiguousarray(intercepts, float)
        self.domain = domain
        if self.slopes.ndim != 2 or len(self.slopes) != len(self.intercepts):
            raise SolverError("inconsistent PL representation")

    @property
    def n_pieces(self) -> int:
        return len(self.slopes)

    def eval_many(self, xs) -> np.ndarray:
        xs = np.ascontiguousarray(np.atleast_2d(xs), float)
        vals, _ = kernels.eval_argmax(xs, self.slopes, self.intercepts)
        return vals

    def eval(self, x) -> float:
        return float(self.eval_many([x])[0])

    def gradient_many(self, xs) -> np.ndarray:
        xs = np.ascontiguousarray(np.atleast_2d(xs), float)
        _, arg = kernels.eval_argmax(xs, self.slopes, self.intercepts)
        return self.slopes[arg]

    def gradient(self, x) -> np.ndarray:
        return self.gradient_many([x])[0]

    def active_indices(self, x, tol: float = 1e-9) -> np.ndarray:
        x = np.asarray(x, float)
        vals = self.slopes @ x - self.intercepts
        return np.flatnonzero(vals >= vals.max() - tol)

    def subdifferential(self, x, tol: float = 1e-9) -> np.ndarray:
        """Extreme points of the subdifferential (achieving slopes)."""
        act = self.slopes[self.active_indices(x, tol)]
        if len(act) <= 2:
            return act
        try:
            hull = ConvexHull(act)
            return act[hull.vertices]
        except QhullError:
            # collinear slopes: return the two extremes
            d = act - act.mean(axis=0)
            t = d @ d[np.argmax(np.hypot(*d.T))]
            return act[[np.argmin(t), np.argmax(t)]]


class PowerDiagram:
    """Power cells of a weighted point cloud clipped to a convex domain.

    Stores the raw padded vertex arrays produced by the clipping kernel;
    individual cells materialize as ConvexPolygon on demand.
    """

    def __init__(self, domain, points, weights, verts, elabels, nv, areas, cents):
        self.domain = domain
        self.points = points
        self.weights = weights
        self._verts = verts
        self._elabels = elabels
        self.nv = nv
        self.areas = areas
        self.centroids = cents

    @property
    def n(self) -> int:
        return len(self.points)

    def cell(self, i: int) -> ConvexPolygon | None:
        if self.nv[i] < 3:
            return None
        try:
            return ConvexPolygon(self._verts[i, : self.nv[i]])
        except GeometryError:
            return None

    def cell_vertices(self, i: int) -> np.ndarray:
        return self._verts[i, : self.nv[i]]

    def adjacency(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(i, j, shared edge length, |y_i - y_j|) over directed edges."""
        ei, ej, ln = kernels.edge_lengths(self._verts, self._elabels, self.nv)
        dist = np.hypot(*(self.points[ei] - self.points[ej]).T)
        return ei, ej, ln, dist

    def subdivision_vertices(self, decimals: int = 9) -> np.ndarray:
        """Unique vertices of the cell complex (deduplicated)."""
        chunks = [self._verts[i, : self.nv[i]] for i in range(self.n) if self.nv[i] >= 3]
        allv = np.vstack(chunks)
        return np.unique(np.round(allv, decimals), axis=0)

    def second_moments(self) -> np.ndarray:
        """Per-cell integral of |x - y_i|^2 over the cell."""
        out = np.zeros(self.n)
        for i in range(self.n):
            m = self.nv[i]
            if m < 3:
                continue
            v = self._verts[i, :m]
            c = self.centroids[i]
            w = np.roll(v, -1, axis=0)
            # midpoint rule on the fan triangulation: exact for quadratics
            tri_area = 0.5 * ((v[:, 0] - c[0]) * (w[:, 1] - c[1])
                              - (w[:, 0] - c[0]) * (v[:, 1] - c[1]))
            y = self.points[i]
            for mid in (0.5 * (v + w), 0.5 * (v + c), 0.5 * (w + c)):
                d = mid - y
                out[i] += np.sum(tri_area / 3.0 * (d[:, 0] ** 2 + d[:, 1] ** 2))
        return out


# ---------------------------------------------------------------------------
# diagram construction


def _full_graph(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n <= 1:
        return np.zeros(2, np.int64), np.zeros(0, np.int64)
    indptr = np.arange(n + 1, dtype=np.int64) * (n - 1)
    indices = np.concatenate([np.delete(np.arange(n), i) for i in range(n)]).astype(np.int64)
    return indptr, indices


def _neighbor_graph(points: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Regular-triangulation neighbours via the lifted 3-D convex hull."""
    n = len(points)
    if n <= 4:
        return _full_graph(n)
    z = np.sum(points ** 2, axis=1) - weights
    try:
        hull = ConvexHull(np.column_stack([points, z]), qhull_options="Qt")
    except QhullError:
        return _full_graph(n)
    lower = hull.equations[:, 2] < -1e-12
    simp = hull.simplices[lower]
    if len(simp) == 0:
        return _full_graph(n)
    a = np.concatenate([simp[:, 0], simp[:, 1], simp[:, 2]])
    b = np.concatenate([simp[:, 1], simp[:, 2], simp[:, 0]])
    i = np.concatenate([a, b])
    j = np.concatenate([b, a])
    key = np.unique(i.astype(np.int64) * n + j)
    i = (key // n).astype(np.int64)
    j = (key % n).astype(np.int64)
    indptr = np.zeros(n + 1, np.int64)
    np.add.at(indptr, i + 1, 1)
    indptr = np.cumsum(indptr)
    return indptr, j


def _raw_cells(domain: ConvexPolygon, points: np.ndarray, weights: np.ndarray,
               graph=None):
    n = len(points)
    if graph is None:
        graph = _neighbor_graph(points, weights)
    indptr, indices = graph
    ii = np.repeat(np.arange(n), np.diff(indptr))
    normals = points[indices] - points[ii]
    p2 = np.sum(points ** 2, axis=1)
    offsets = 0.5 * (p2[indices] - p2[ii] - weights[indices] + weights[ii])
    dom = np.ascontiguousarray(domain.vertices)
    max_deg = int(np.diff(indptr).max()) if n > 1 else 0
    maxv = len(dom) + max_deg + 4
    verts, elabels, nv, areas, cents = kernels.clip_cells(
        np.ascontiguousarray(normals), np.ascontiguousarray(offsets),
        indptr, np.ascontiguousarray(indices), dom, maxv)
    if n > 1:
        hidden = np.diff(indptr) == 0
        if hidden.any():
            nv[hidden] = 0
            areas[hidden] = 0.0
            cents[hidden] = 0.0
    return verts, elabels, nv, areas, cents


def power_diagram(domain: ConvexPolygon, cloud: TargetCloud,
                  weights: DualWeights | np.ndarray) -> PowerDiagram:
    """Power (Laguerre) diagram of the cloud restricted to the domain."""
    w = weights.w if isinstance(weights, DualWeights) else np.asarray(weights, float)
    pts = cloud.points
    if len(pts) > 1:
        d, _ = cKDTree(pts).query(pts, k=2)
        if d[:, 1].min() <= 1e-12 * max(1.0, domain.diameter()):
            raise SolverError("duplicate target points")
    out = _raw_cells(domain, pts, w)
    return PowerDiagram(domain, pts, w, *out)


# ---------------------------------------------------------------------------
# Newton solve


def _laplacian(points, verts, elabels, nv):
    ei, ej, ln = kernels.edge_lengths(verts, elabels, nv)
    n = len(points)
    if len(ei) == 0:
        return sp.csr_matrix((n, n)), (ei, ej, ln)
    dist = np.hypot(*(points[ei] - points[ej]).T)
    coef = ln / (2.0 * dist)
    diag = np.bincount(ei, coef, minlength=n)
    rows = np.concatenate([np.arange(n), ei])
    cols = np.concatenate([np.arange(n), ej])
    data = np.concatenate([diag, -coef])
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n)), (ei, ej, ln)


def _newton_loop(domain, points, masses, w, tol_abs, max_iter, cell_floor=None):
    """Damped Newton on the dual weights; returns (w, iterations, residual)."""
    total = masses.sum()
    verts, elabels, nv, areas, cents = _raw_cells(domain, points, w)
    res = float(np.max(np.abs(areas - masses)))
    res2 = float(np.linalg.norm(areas - masses))
    if areas.min() <= 0:
        raise SolverError("empty cell at initialization")
    if cell_floor is None:
        cell_floor = 0.5 * min(areas.min(), masses.min())
    it = 0
    while res > tol_abs and it < max_iter:
        lap, _ = _laplacian(points, verts, elabels, nv)
        ncomp, _ = connected_components(lap != 0, directed=False)
        if ncomp > 1 and len(points) > 1:
            raise SolverError("disconnected power diagram")
        rhs = masses - areas
        # pin node 0 to fix the additive gauge
        nn = len(points)
        if nn == 1:
            break
        keep = np.arange(1, nn)
        delta = np.zeros(nn)
        sub = lap[keep][:, keep].tocsc()
        delta[1:] = spsolve(sub, rhs[keep])
        alpha = 1.0
        accepted = False
        while alpha >= 1e-12:
            wt = w + alpha * delta
            o = _raw_cells(domain, points, wt)
            a_t = o[3]
            r2_t = float(np.linalg.norm(a_t - masses))
            if a_t.min() >= cell_floor and r2_t < res2:
                w = wt
                verts, elabels, nv, areas, cents = o
                res = float(np.max(np.abs(areas - masses)))
                res2 = r2_t
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            raise SolverError("Newton step rejected at minimal damping")
        it += 1
    if res > tol_abs:
        raise SolverError(f"no convergence in {max_iter} iterations (residual {res:.3g})")
    return w, it, res


def _anchor_points(domain: ConvexPolygon, points: np.ndarray) -> np.ndarray:
    """Shrunk copy of the cloud placed well inside the domain."""
    c = domain.centroid()
    inr = domain.distance_to_boundary(c)
    cy = points.mean(axis=0)
    rmax = float(np.max(np.hypot(*(points - cy).T)))
    scale = 0.5 * inr / max(rmax, 1e-300)
    return c + scale * (points - cy)


def newton_solve(domain: ConvexPolygon, cloud: TargetCloud,
                 tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 ) -> tuple[DualWeights, "PLConvexPotential", PowerDiagram, dict]:
    """Solve the semi-discrete problem.

    Returns (weights, potential, diagram, info); info records iteration
    counts and the achieved residual (relative to the source area).
    """
    area1 = domain.area()
    masses = cloud.masses
    if abs(masses.sum() - area1) > 1e-9 * area1:
        raise SolverError("target masses must sum to the source area")
    if masses.max() >= area1:
        raise SolverError("every target mass must be below the source area")
    from .geometry import eccentricity
    if eccentricity(fit_ellipse(domain, area1)) > MAX_DOMAIN_ECCENTRICITY:
        raise SolverError("degenerate (needle-like) source domain")

    pts = cloud.points
    n = len(pts)
    tol_abs = tol * area1
    w = np.zeros(n)
    total_iters = 0
    if n == 1:
        dw = DualWeights(w)
        diag = power_diagram(domain, cloud, dw)
        psi = potential_from_weights(cloud, dw, domain)
        return dw, psi, diag, {"iterations": 0, "residual": 0.0, "continuation_steps": 0}

    init = _raw_cells(domain, pts, w)
    cont_steps = 0
    if init[3].min() <= 0:
        # continuation: slide the targets out from a shrunk copy inside U1
        anchors = _anchor_points(domain, pts)
        t = 0.0
        dt = 0.5
        y_prev = anchors
        while t < 1.0:
            t_try = min(1.0, t + dt)
            y_t = (1 - t_try) * anchors + t_try * pts
            # transport the warm start so the affine intercepts
            # c_i = (|y_i|^2 - w_i)/2 stay fixed under the point move
            w_init = w + np.sum(y_t ** 2 - y_prev ** 2, axis=1)
            try:
                w_t, it, _ = _newton_loop(domain, y_t, masses, w_init,
                                          max(tol_abs, 1e-4 * area1), max_iter)
            except SolverError:
                dt *= 0.5
                if dt < 1.0 / 1024:
                    raise SolverError("continuation failed to reach the target cloud")
                continue
            w = w_t
            y_prev = y_t
            t = t_try
            cont_steps += 1
            total_iters += it
            dt = min(2 * dt, 0.5)
        w = w + np.sum(pts ** 2 - y_prev ** 2, axis=1)

    w, it, res = _newton_loop(domain, pts, masses, w, tol_abs, max_iter)
    dw = DualWeights(w)
    diag = power_diagram(domain, cloud, dw)
    psi = potential_from_weights(cloud, dw, domain)
    info = {"iterations": it, "residual": res / area1,
            "continuation_steps": cont_steps, "total_iterations": total_iters + it}
    return dw, psi, diag, info


def potential_from_weights(cloud: TargetCloud, weights: DualWeights,
                           domain: ConvexPolygon) -> PLConvexPotential:
    w = weights.w if isinstance(weights, DualWeights) else np.asarray(weights, float)
    c = 0.5 * (np.sum(cloud.points ** 2, axis=1) - w)
    return PLConvexPotential(cloud.points, c, domain)


def legendre_dual(psi: PLConvexPotential, diagram: PowerDiagram,
                  target_domain: ConvexPolygon) -> PLConvexPotential:
    """Legendre transform of a solved PL potential.

    Exact for PL psi: the inner maximization of x.y - psi(x) over the
    source polygon is attained at a vertex of the power-diagram
    subdivision.
    """
    xs = diagram.subdivision_vertices()
    vals = psi.eval_many(xs)
    return PLConvexPotential(xs, vals, target_domain)


def transport_cost(diagram: PowerDiagram) -> float:
    """Total quadratic cost sum_i int_cell |x - y_i|^2 / 2 dx."""
    return 0.5 * float(diagram.second_moments().sum())


# ---------------------------------------------------------------------------
# target sampling


def sample_target(domain: ConvexPolygon, n: int, seed: int = 0,
                  source_area: float | None = None,
                  lloyd_iters: int = LLOYD_ITERS) -> TargetCloud:
    """Quantize the uniform measure on the domain into n equal masses.

    Stratified seeded start followed by a fixed number of Lloyd
    iterations; deterministic for a given seed.
    """
    if n < 1:
        raise SolverError("need n >= 1 target points")
    if source_area is None:
        source_area = domain.area()
    rng = np.random.default_rng(seed)
    if n == 1:
        pts = domain.centroid()[None, :]
    else:
        lo, hi = domain.bounding_box()
        span = hi - lo
        gx = max(1, int(np.ceil(np.sqrt(n * span[0] / span[1]))))
        gy = max(1, int(np.ceil(n / gx)))
        jx = rng.random((gy, gx))
        jy = rng.random((gy, gx))
        cand = np.column_stack([
            (np.tile(np.arange(gx), gy) + jx.ravel()) * span[0] / gx + lo[0],
            (np.repeat(np.arange(gy), gx) + jy.ravel()) * span[1] / gy + lo[1],
        ])
        inside = domain.contains_many(cand, tol=-1e-12)
        pts = cand[inside][:n]
        while len(pts) < n:
            extra = lo + rng.random((4 * n, 2)) * span
            ok = extra[domain.contains_many(extra, tol=-1e-12)]
            pts = np.vstack([pts, ok])[:n]
        pts = np.ascontiguousarray(pts)
        w0 = np.zeros(n)
        for _ in range(lloyd_iters):
            _, _, nv, areas, cents = _raw_cells(domain, pts, w0)
            moved = nv >= 3
            pts = np.where(moved[:, None], cents, pts)
    masses = np.full(n, source_area / n)
    return TargetCloud(np.ascontiguousarray(pts), masses)


# ---------------------------------------------------------------------------
# solution files


def save_solution(path: str, source: ConvexPolygon, target: ConvexPolygon,
                  cloud: TargetCloud, weights: DualWeights, info: dict) -> None:
    payload = {
        "source_polygon": source.to_json(),
        "target_polygon": target.to_json(),
        "points": [[float(a), float(b)] for a, b in cloud.points],
        "masses": [float(m) for m in cloud.masses],
        "weights": [float(v) for v in weights.w],
        "tol_achieved": info.get("residual"),
        "iterations": info.get("iterations"),
    }
    write_atomic(path, json.dumps(payload))


def load_solution(path: str):
    with open(path) as f:
        d = json.load(f)
    source = ConvexPolygon.from_json(d["source_polygon"])
    target = ConvexPolygon.from_json(d["target_polygon"])
    cloud = TargetCloud(np.array(d["points"]), np.array(d["masses"]))
    weights = DualWeights(np.array(d["weights"]))
    psi = potential_from_weights(cloud, weights, source)
    diagram = power_diagram(source, cloud, weights)
    return source, target, cloud, weights, psi, diagram


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
