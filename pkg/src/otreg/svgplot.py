"""Minimal deterministic SVG emitter for geometric overlays.

Shapes are collected in world coordinates and written with a y-flip
into a fixed-size viewport.  Output depends only on the shapes added,
so repeated runs of a seeded experiment produce identical files.
"""

from __future__ import annotations

import numpy as np

from .geometry import ConvexPolygon, Ellipse, Ray
from .solver import write_atomic


def _fmt(x: float) -> str:
    return "%.6g" % float(x)


class SvgCanvas:
    def __init__(self, width: int = 640, height: int = 640, margin: float = 0.05):
        self.width = width
        self.height = height
        self.margin = margin
        self._elements: list[str] = []
        self._lo = np.array([np.inf, np.inf])
        self._hi = np.array([-np.inf, -np.inf])

    def _track(self, pts: np.ndarray) -> None:
        pts = np.atleast_2d(pts)
        self._lo = np.minimum(self._lo, pts.min(axis=0))
        self._hi = np.maximum(self._hi, pts.max(axis=0))

    def add_polygon(self, poly: ConvexPolygon, stroke: str = "#000",
                    fill: str = "none", width: float = 1.5,
                    opacity: float = 1.0) -> None:
        v = poly.vertices
        self._track(v)
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in v)
        self._elements.append(
            f'<polygon points="{pts}" fill="{fill}" stroke="{stroke}" '
            f'stroke-opacity="{_fmt(opacity)}" data-width="{_fmt(width)}"/>')

    def add_ellipse(self, ell: Ellipse, stroke: str = "#c00",
                    width: float = 1.5, n_pts: int = 90) -> None:
        pts = ell.boundary_points(n_pts)
        self._track(pts)
        s = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        self._elements.append(
            f'<polygon points="{s}" fill="none" stroke="{stroke}" '
            f'data-width="{_fmt(width)}"/>')

    def add_ray(self, ray: Ray, length: float, stroke: str = "#080",
                width: float = 1.5) -> None:
        a = ray.origin
        b = ray.origin + length * ray.direction
        self._track(np.vstack([a, b]))
        self._elements.append(
            f'<line x1="{_fmt(a[0])}" y1="{_fmt(a[1])}" x2="{_fmt(b[0])}" '
            f'y2="{_fmt(b[1])}" stroke="{stroke}" data-width="{_fmt(width)}"/>')

    def add_points(self, pts, radius: float = 0.004, fill: str = "#00c") -> None:
        pts = np.atleast_2d(np.asarray(pts, float))
        self._track(pts)
        for x, y in pts:
            self._elements.append(
                f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(radius)}" '
                f'fill="{fill}"/>')

    def add_polyline(self, pts, stroke: str = "#555", width: float = 1.0) -> None:
        pts = np.atleast_2d(np.asarray(pts, float))
        self._track(pts)
        s = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        self._elements.append(
            f'<polyline points="{s}" fill="none" stroke="{stroke}" '
            f'data-width="{_fmt(width)}"/>')

    def render(self) -> str:
        if not np.all(np.isfinite(self._lo)):
            lo, hi = np.zeros(2), np.ones(2)
        else:
            lo, hi = self._lo, self._hi
        span = np.maximum(hi - lo, 1e-12)
        pad = self.margin * span.max()
        lo = lo - pad
        span = span + 2 * pad
        scale = min(self.width / span[0], self.height / span[1])
        # world coordinates embedded via a single flip+scale transform
        sw = _fmt(1.5 / scale)
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<g transform="translate(0,{self.height}) scale({_fmt(scale)},'
            f'{_fmt(-scale)}) translate({_fmt(-lo[0])},{_fmt(-lo[1])})" '
            f'stroke-width="{sw}">\n')
        return head + "\n".join(self._elements) + "\n</g>\n</svg>\n"

    def write(self, path: str) -> None:
        write_atomic(path, self.render())
