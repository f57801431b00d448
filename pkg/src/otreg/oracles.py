"""Independent ground-truth generators used by the test suite.

Exact small-n assignment, the closed-form affine potential family, and
Alexandrov-measure residual checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .geometry import AffineMap, ConvexPolygon, Ellipse
from .solver import PowerDiagram, TargetCloud

ASSIGNMENT_SIZE_CAP = 500


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class AnalyticPair:
    """Closed-form pair: psi(x) = x.Ax/2 transports U1 onto A U1.

    A must be symmetric positive definite with det 1, so the pair is a
    volume-preserving exact solution.
    """

    matrix: np.ndarray
    source: ConvexPolygon

    def __post_init__(self):
        a = np.asarray(self.matrix, float).copy()
        if a.shape != (2, 2) or abs(a[0, 1] - a[1, 0]) > 1e-12:
            raise OracleError("matrix must be symmetric 2x2")
        evals = np.linalg.eigvalsh(a)
        if evals[0] <= 0:
            raise OracleError("matrix must be positive definite")
        if abs(np.linalg.det(a) - 1.0) > 1e-9:
            raise OracleError("matrix must have determinant 1")
        a.flags.writeable = False
        object.__setattr__(self, "matrix", a)

    @property
    def target(self) -> ConvexPolygon:
        return self.source.transform(AffineMap(self.matrix, unimodular=True))

    def potential(self, xs) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, float))
        return 0.5 * np.einsum("ki,ij,kj->k", xs, self.matrix, xs)

    def map(self, xs) -> np.ndarray:
        return np.atleast_2d(np.asarray(xs, float)) @ self.matrix.T

    def dual_potential(self, ys) -> np.ndarray:
        ys = np.atleast_2d(np.asarray(ys, float))
        ainv = np.linalg.inv(self.matrix)
        return 0.5 * np.einsum("ki,ij,kj->k", ys, ainv, ys)

    def section_ellipse(self, h: float) -> Ellipse:
        """Level set {x . A x < 2h} of the potential at the origin."""
        evals, evecs = np.linalg.eigh(self.matrix)
        semi_long = np.sqrt(2 * h / evals[0])
        semi_short = np.sqrt(2 * h / evals[1])
        return Ellipse(np.zeros(2), semi_short, semi_long, evecs[:, 0])

    def eccentricity(self) -> float:
        """Eccentricity of every origin section (constant in h)."""
        evals = np.linalg.eigvalsh(self.matrix)
        return float(np.sqrt(evals[1] / evals[0]))


def exact_assignment(sources: np.ndarray, targets: np.ndarray
                     ) -> tuple[np.ndarray, float]:
    """Optimal equal-mass assignment under cost |x - y|^2 / 2.

    Returns (permutation, total cost per unit mass); exact combinatorial
    solve, capped at 500 points.
    """
    sources = np.asarray(sources, float)
    targets = np.asarray(targets, float)
    n = len(sources)
    if n != len(targets):
        raise OracleError("needs equally many sources and targets")
    if n > ASSIGNMENT_SIZE_CAP:
        raise OracleError(f"assignment oracle capped at n={ASSIGNMENT_SIZE_CAP}")
    d2 = np.sum((sources[:, None, :] - targets[None, :, :]) ** 2, axis=-1)
    rows, cols = linear_sum_assignment(0.5 * d2)
    perm = np.empty(n, np.int64)
    perm[rows] = cols
    return perm, float(d2[rows, cols].sum() * 0.5)


def ma_residual(diagram: PowerDiagram, cloud: TargetCloud, cell_indices) -> float:
    """Alexandrov-measure residual over a union of power cells.

    |mass of the gradient image of Q - area(Q)| where Q is the union of
    the listed cells.
    """
    idx = np.asarray(cell_indices, np.int64)
    if idx.ndim != 1 or len(np.unique(idx)) != len(idx):
        raise OracleError("cell_indices must be distinct")
    return float(abs(cloud.masses[idx].sum() - diagram.areas[idx].sum()))
