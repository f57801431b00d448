import numpy as np
import pytest

from otreg.geometry import (AffineMap, ConvexPolygon, Ellipse, GeometryError,
                            angle, arc_position, boundary_point, clip_halfplane,
                            eccentricity, fit_ellipse, inward_normal,
                            left_tangent, normalizing_map, perimeter, perp,
                            polygon_intersection, project_to_boundary,
                            right_tangent)

SQUARE = ConvexPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])


def random_polygon(rng, n_pts=10):
    from scipy.spatial import ConvexHull
    pts = rng.random((n_pts, 2)) * rng.uniform(0.5, 3.0)
    hull = ConvexHull(pts)
    return ConvexPolygon(pts[hull.vertices])


def test_square_measures():
    assert SQUARE.area() == pytest.approx(1.0)
    assert SQUARE.centroid() == pytest.approx([0.5, 0.5])
    assert SQUARE.diameter() == pytest.approx(np.sqrt(2))
    assert perimeter(SQUARE) == pytest.approx(4.0)
    # covariance of the uniform unit square is I/12
    assert SQUARE.second_moment() == pytest.approx(np.eye(2) / 12.0)


def test_canonicalization_cw_input_and_collinear_vertices():
    cw = ConvexPolygon([[0, 1], [1, 1], [1, 0], [0, 0]])
    assert cw.area() == pytest.approx(1.0)
    redundant = ConvexPolygon([[0, 0], [0.5, 0], [1, 0], [1, 1], [0, 1]])
    assert redundant.n == 4


def test_nonconvex_rejected():
    with pytest.raises(GeometryError):
        ConvexPolygon([[0, 0], [2, 0], [1, 0.2], [0, 2]])


def test_contains_and_distance():
    assert SQUARE.contains([0.5, 0.5])
    assert SQUARE.contains([0.0, 0.5])          # boundary counts
    assert not SQUARE.contains([1.1, 0.5])
    assert SQUARE.distance_to_boundary([0.5, 0.5]) == pytest.approx(0.5)
    assert SQUARE.distance_to_boundary([0.1, 0.5]) == pytest.approx(0.1)
    assert SQUARE.distance_to_boundary([-0.1, 0.5]) == pytest.approx(-0.1)


def test_clip_halfplane():
    half = clip_halfplane(SQUARE, [1.0, 0.0], 0.5)
    assert half is not None
    assert half.area() == pytest.approx(0.5)
    assert clip_halfplane(SQUARE, [1.0, 0.0], -0.5) is None
    whole = clip_halfplane(SQUARE, [1.0, 0.0], 2.0)
    assert whole.area() == pytest.approx(1.0)


def test_polygon_intersection_matches_clipping():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p = random_polygon(rng)
        q = random_polygon(rng)
        inter = polygon_intersection(p, q)
        if inter is None:
            continue
        assert inter.area() <= min(p.area(), q.area()) + 1e-12
        for v in inter.vertices:
            assert p.contains(v, tol=1e-7)
            assert q.contains(v, tol=1e-7)


def test_intersection_disjoint_is_none():
    far = SQUARE.translate([5.0, 0.0])
    assert polygon_intersection(SQUARE, far) is None


def test_angle():
    assert angle([1, 0], [0, 1]) == pytest.approx(np.pi / 2)
    assert angle([1, 0], [-1, 0]) == pytest.approx(np.pi)
    assert angle([2, 0], [3, 0]) == pytest.approx(0.0)


def test_ellipse_gauge_and_area():
    e = Ellipse([1.0, 2.0], 0.5, 2.0, [1.0, 1.0])
    assert e.area() == pytest.approx(np.pi)
    assert eccentricity(e) == pytest.approx(4.0)
    long_pt = e.center + 2.0 * e.e_long
    short_pt = e.center + 0.5 * e.e_short
    assert e.norm_of(long_pt) == pytest.approx(1.0)
    assert e.norm_of(short_pt) == pytest.approx(1.0)
    assert e.norm_of(e.center) == 0.0
    assert e.with_area(2 * np.pi).area() == pytest.approx(2 * np.pi)


def test_perp_swaps_axes():
    e = Ellipse([0, 0], 1.0, 3.0, [1.0, 0.0])
    q = perp(e)
    assert eccentricity(q) == pytest.approx(eccentricity(e))
    assert abs(q.e_long @ e.e_long) == pytest.approx(0.0)


def test_fit_ellipse_of_known_shapes():
    e = fit_ellipse(SQUARE, np.pi)
    assert eccentricity(e) == pytest.approx(1.0)
    assert e.center == pytest.approx([0.5, 0.5])
    rect = ConvexPolygon([[0, 0], [4, 0], [4, 1], [0, 1]])
    e = fit_ellipse(rect, np.pi)
    assert eccentricity(e) == pytest.approx(4.0)
    assert abs(e.e_long @ [1, 0]) == pytest.approx(1.0)
    assert e.area() == pytest.approx(np.pi)


def test_fit_ellipse_unimodular_equivariance():
    rng = np.random.default_rng(11)
    for _ in range(20):
        poly = random_polygon(rng)
        m = rng.normal(size=(2, 2))
        m /= np.sqrt(abs(np.linalg.det(m)))
        if np.linalg.det(m) < 0:
            m = m[::-1]
        amap = AffineMap(m, rng.normal(size=2), unimodular=True)
        e1 = amap.apply_ellipse(fit_ellipse(poly, 1.0))
        e2 = fit_ellipse(poly.transform(amap), 1.0)
        assert e1.center == pytest.approx(e2.center, abs=1e-9)
        assert e1.semi_long == pytest.approx(e2.semi_long, abs=1e-9)
        assert abs(e1.e_long @ e2.e_long) == pytest.approx(1.0, abs=1e-9)


def test_affine_map_compose_inverse():
    rng = np.random.default_rng(5)
    a = AffineMap(rng.normal(size=(2, 2)) + 3 * np.eye(2), rng.normal(size=2))
    b = AffineMap(rng.normal(size=(2, 2)) + 3 * np.eye(2), rng.normal(size=2))
    x = rng.normal(size=(7, 2))
    assert a.compose(b).apply(x) == pytest.approx(a.apply(b.apply(x)))
    assert a.inverse().apply(a.apply(x)) == pytest.approx(x)


def test_normalizing_map_norm_equals_axis_ratio():
    rng = np.random.default_rng(9)
    for _ in range(20):
        s = rng.uniform(0.2, 1.0)
        ell = Ellipse(rng.normal(size=2), s, s * rng.uniform(1, 6),
                      rng.normal(size=2))
        m = normalizing_map(ell)
        assert np.linalg.det(m.linear) == pytest.approx(1.0)
        assert m.op_norm() ** 2 == pytest.approx(eccentricity(ell))
        # image of the ellipse boundary is the circle of equal area
        img = m.apply(ell.boundary_points(32))
        r = np.sqrt(ell.semi_short * ell.semi_long)
        assert np.hypot(*img.T) == pytest.approx(np.full(32, r))


def test_boundary_param_roundtrip():
    rng = np.random.default_rng(17)
    poly = random_polygon(rng)
    for s in rng.random(30):
        x = boundary_point(poly, s)
        assert arc_position(poly, x) == pytest.approx(s, abs=1e-9)
        _, d = project_to_boundary(poly, x)
        assert d == pytest.approx(0.0, abs=1e-12)


def test_tangents_on_square():
    # edge interior: the two tangents are the opposite edge directions
    l = left_tangent(SQUARE, [0.5, 0.0])
    r = right_tangent(SQUARE, [0.5, 0.0])
    assert l.direction == pytest.approx([-1.0, 0.0])
    assert r.direction == pytest.approx([1.0, 0.0])
    # corner: one-sided tangents along the two incident edges
    l = left_tangent(SQUARE, [1.0, 0.0])
    r = right_tangent(SQUARE, [1.0, 0.0])
    assert l.direction == pytest.approx([-1.0, 0.0])
    assert r.direction == pytest.approx([0.0, 1.0])


def test_inward_normal():
    assert inward_normal(SQUARE, [0.5, 0.0]) == pytest.approx([0.0, 1.0])
    assert inward_normal(SQUARE, [1.0, 0.5]) == pytest.approx([-1.0, 0.0])


def test_project_to_boundary_outside():
    p, d = project_to_boundary(SQUARE, [2.0, 0.5])
    assert p == pytest.approx([1.0, 0.5])
    assert d == pytest.approx(1.0)


def test_json_roundtrip():
    rng = np.random.default_rng(23)
    poly = random_polygon(rng)
    back = ConvexPolygon.from_json(poly.to_json())
    assert back == poly
    e = Ellipse([0.1, -0.2], 0.3, 0.9, [2.0, 1.0])
    f = Ellipse.from_json(e.to_json())
    assert f.semi_long == pytest.approx(e.semi_long)
    assert f.e_long == pytest.approx(e.e_long)
