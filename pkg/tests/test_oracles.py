import numpy as np
import pytest

from otreg.geometry import ConvexPolygon
from otreg.oracles import (AnalyticPair, OracleError, exact_assignment,
                           ma_residual)

SQUARE = ConvexPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])


def test_analytic_pair_validation():
    with pytest.raises(OracleError):
        AnalyticPair(np.array([[2.0, 0.1], [0.0, 0.5]]), SQUARE)  # asymmetric
    with pytest.raises(OracleError):
        AnalyticPair(np.diag([2.0, 1.0]), SQUARE)  # det != 1
    with pytest.raises(OracleError):
        AnalyticPair(np.diag([-1.0, -1.0]), SQUARE)  # not positive


def test_analytic_pair_identity():
    pair = AnalyticPair(np.eye(2), SQUARE)
    assert pair.eccentricity() == pytest.approx(1.0)
    xs = np.random.default_rng(0).random((50, 2))
    assert pair.potential(xs) == pytest.approx(0.5 * np.sum(xs ** 2, axis=1))
    assert pair.map(xs) == pytest.approx(xs)


def test_analytic_pair_diagonal_sections():
    a = 3.0
    pair = AnalyticPair(np.diag([a, 1 / a]), SQUARE)
    assert pair.eccentricity() == pytest.approx(a)
    e = pair.section_ellipse(0.02)
    assert e.semi_long == pytest.approx(np.sqrt(2 * 0.02 * a))
    assert e.semi_short == pytest.approx(np.sqrt(2 * 0.02 / a))
    # long axis of the section is the weak axis of the quadratic
    assert abs(e.e_long @ [0, 1]) == pytest.approx(1.0)
    assert pair.target.area() == pytest.approx(SQUARE.area())


def test_analytic_pair_young_equality():
    rng = np.random.default_rng(1)
    m = np.array([[1.5, 0.4], [0.4, (1 + 0.4 ** 2) / 1.5]])
    pair = AnalyticPair(m, SQUARE)
    xs = rng.random((100, 2))
    ys = pair.map(xs)
    lhs = pair.potential(xs) + pair.dual_potential(ys)
    assert lhs == pytest.approx(np.sum(xs * ys, axis=1), abs=1e-12)


def test_exact_assignment_trivial_cases():
    pts = np.random.default_rng(2).random((20, 2))
    perm, cost = exact_assignment(pts, pts)
    assert np.array_equal(perm, np.arange(20))
    assert cost == pytest.approx(0.0)
    perm, cost = exact_assignment(pts[:1], pts[:1] + 1.0)
    assert perm[0] == 0
    assert cost == pytest.approx(0.5 * 2.0)


def test_exact_assignment_beats_random_permutations():
    rng = np.random.default_rng(3)
    src = rng.random((100, 2))
    tgt = rng.random((100, 2))
    _, cost = exact_assignment(src, tgt)
    d2 = 0.5 * np.sum((src[:, None] - tgt[None]) ** 2, axis=-1)
    for _ in range(200):
        perm = rng.permutation(100)
        assert cost <= d2[np.arange(100), perm].sum() + 1e-12


def test_exact_assignment_size_cap():
    pts = np.zeros((501, 2))
    with pytest.raises(OracleError):
        exact_assignment(pts, pts)


def test_ma_residual_additivity(identity_small):
    diagram = identity_small["diagram"]
    cloud = identity_small["cloud"]
    rng = np.random.default_rng(4)
    # single cells and the whole domain are within the Newton tolerance
    for i in rng.integers(0, cloud.n, 10):
        assert ma_residual(diagram, cloud, [int(i)]) <= 1e-7
    assert ma_residual(diagram, cloud, np.arange(cloud.n)) <= 1e-9
    # random unions: residual bounded by the sum of per-cell residuals
    for _ in range(20):
        idx = rng.choice(cloud.n, size=10, replace=False)
        per_cell = sum(ma_residual(diagram, cloud, [int(i)]) for i in idx)
        assert ma_residual(diagram, cloud, idx) <= per_cell + 1e-15


def test_ma_residual_rejects_duplicates(identity_small):
    with pytest.raises(OracleError):
        ma_residual(identity_small["diagram"], identity_small["cloud"],
                    [0, 0, 1])
