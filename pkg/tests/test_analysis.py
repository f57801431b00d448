import numpy as np
import pytest

from conftest import quad_potential
from otreg.analysis import (AnalysisError, CentringError, bootstrap_slope_ci,
                            centred_section, check_engulfing, chebyshev_center,
                            corner_growth, eccentricity_curve, fit_loglog,
                            hessian_estimate, measure_delta_bar,
                            obliqueness_check, renormalize, section,
                            spectral_norm_2x2, w2p_norm)
from otreg.geometry import ConvexPolygon, eccentricity, fit_ellipse

BOX = ConvexPolygon([[-1, -1], [1, -1], [1, 1], [-1, 1]])
DIAG = np.diag([3.0, 1.0 / 3.0])


@pytest.fixture(scope="module")
def quad_iso():
    return quad_potential(np.eye(2), BOX, m=61)


@pytest.fixture(scope="module")
def quad_aniso():
    return quad_potential(DIAG, BOX, m=81)


def test_section_of_quadratic_is_sublevel_ellipse(quad_aniso):
    # {x : q(x) - q(0) - p.x <= h} at p = grad q(0) = 0 is the ellipse
    # q <= h with area 2*pi*h / sqrt(det A)
    h = 0.02
    sec = section(quad_aniso, [0, 0], [0, 0], h)
    # the polygon circumscribes the ellipse, so it is slightly larger
    assert sec.polygon.area() >= 2 * np.pi * h * (1 - 1e-9)
    assert sec.polygon.area() == pytest.approx(2 * np.pi * h, rel=1e-2)
    ell = fit_ellipse(sec.polygon, sec.polygon.area())
    assert eccentricity(ell) == pytest.approx(3.0, rel=1e-2)
    # long axis along the weak eigendirection (y)
    assert abs(ell.e_long @ [0, 1]) == pytest.approx(1.0, abs=1e-3)


def test_section_rejects_nonpositive_height(quad_iso):
    with pytest.raises(AnalysisError):
        section(quad_iso, [0, 0], [0, 0], 0.0)


def test_centred_section_converges_on_quadratic(quad_aniso):
    # off-centre start: the fixed point recovers the tangent slope
    x0 = np.array([0.2, -0.1])
    sec = centred_section(quad_aniso, x0, 0.01)
    assert sec.centred
    assert sec.centring_residual <= 1e-6
    assert sec.slope == pytest.approx(DIAG @ x0, abs=2e-3)
    assert sec.polygon.centroid() == pytest.approx(x0, abs=1e-6)


def test_eccentricity_curve_constant_on_quadratic(quad_aniso):
    curve = eccentricity_curve(quad_aniso, [0, 0], h_max=0.05, h_min=0.005)
    assert len(curve.samples) >= 5
    hs = [s.h for s in curve.samples]
    assert np.all(np.diff(hs) < 0)
    for s in curve.samples:
        assert s.eta == pytest.approx(3.0, rel=0.05)
        assert s.centring_residual <= 1e-6


def test_renormalize_maps_sections_to_disks(quad_aniso):
    tdom = ConvexPolygon(BOX.vertices @ DIAG.T)
    phi = quad_potential(np.linalg.inv(DIAG), tdom, m=81)
    h = 0.02
    pair = renormalize(quad_aniso, phi, tdom, [0, 0], h)
    assert abs(np.linalg.det(pair.normalizer.linear)) == pytest.approx(1.0)
    assert pair.normalizer.op_norm() ** 2 == pytest.approx(3.0, rel=0.02)
    assert pair.u.eval([0, 0]) == pytest.approx(0.0, abs=1e-9)
    assert pair.v.eval([0, 0]) == pytest.approx(0.0, abs=1e-9)
    for f in (pair.u, pair.v):
        sec = centred_section(f, [0, 0], 1.0)
        ell = fit_ellipse(sec.polygon, sec.polygon.area())
        assert eccentricity(ell) == pytest.approx(1.0, rel=0.03)
        assert sec.polygon.area() == pytest.approx(2 * np.pi, rel=0.03)


def test_chebyshev_center_square():
    c, r = chebyshev_center(ConvexPolygon([[0, 0], [1, 0], [1, 1], [0, 1]]))
    assert c == pytest.approx([0.5, 0.5])
    assert r == pytest.approx(0.5)


def test_measure_delta_bar_near_one_for_round_sections(quad_iso):
    tdom = BOX
    phi = quad_potential(np.eye(2), tdom)
    pair = renormalize(quad_iso, phi, tdom, [0, 0], 0.02, measure_delta=True)
    # round sections of area 2*pi*h against the pi*h gauge ellipse give a
    # two-sided constant of 1/sqrt(2)
    assert pair.delta_bar == pytest.approx(1 / np.sqrt(2), rel=0.06)


def test_engulfing_scaling_on_quadratic(quad_iso):
    # sections are concentric disks of radius sqrt(2h): the sh-section
    # fits inside the t_bar-dilation exactly when s <= t_bar^2
    x0 = np.zeros(2)
    assert check_engulfing(quad_iso, x0, x0, 0.02, 0.0, 2.0) == 1.0
    s_bar = check_engulfing(quad_iso, x0, x0, 0.02, 0.0, 0.5)
    assert s_bar == pytest.approx(0.25, abs=0.02)


def test_engulfing_rejects_outside_base_point(quad_iso):
    with pytest.raises(AnalysisError):
        check_engulfing(quad_iso, [0, 0], [0.9, 0.9], 0.002, 0.1, 2.0)


def test_hessian_estimate_exact_on_quadratics():
    rng = np.random.default_rng(11)
    for _ in range(50):
        m = rng.standard_normal((2, 2))
        a = m @ m.T + 0.1 * np.eye(2)
        b = rng.standard_normal(2)
        c = rng.standard_normal()

        def f(pts, a=a, b=b, c=c):
            return 0.5 * np.einsum("ki,ij,kj->k", pts, a, pts) + pts @ b + c

        x = rng.standard_normal(2)
        hess, resid = hessian_estimate(f, x, r=0.3 * rng.random() + 0.05)
        assert np.max(np.abs(hess - a)) < 1e-8
        assert resid < 1e-10


def test_hessian_estimate_guards(quad_iso):
    with pytest.raises(AnalysisError):
        hessian_estimate(quad_iso, [0.95, 0.0], 0.2)  # stencil leaves domain
    with pytest.raises(AnalysisError):
        hessian_estimate(quad_iso, [0, 0], 0.05, min_r=0.1)


def test_spectral_norm_matches_numpy():
    rng = np.random.default_rng(12)
    for _ in range(100):
        m = rng.standard_normal((2, 2))
        h = m + m.T
        assert spectral_norm_2x2(h) == pytest.approx(np.linalg.norm(h, 2))


def test_w2p_norm_constant_hessian():
    dom = BOX

    def f(pts):
        return 0.5 * np.sum(pts ** 2, axis=1)

    for p in (1.0, 4.0):
        total, excluded = w2p_norm(f, dom, p)
        assert total == pytest.approx(dom.area() - excluded, rel=1e-6)
        assert 0 <= excluded < dom.area()
    with pytest.raises(AnalysisError):
        w2p_norm(f, dom, 0.0)


def test_obliqueness_identity_edge(identity_small):
    res = obliqueness_check(identity_small["source"],
                            identity_small["target"],
                            identity_small["psi"], [0.5, 0.0])
    assert res["feature"][0] == "edge"
    assert res["margin"] > 0.9
    assert res["angle_left"] == pytest.approx(0.0, abs=15.0)


def test_corner_growth_quadratic_exponent(quad_iso):
    s = np.geomspace(0.05, 0.8, 10)
    slope, s_kept, vals = corner_growth(quad_iso, [-1.0, -1.0],
                                        [1.0, 1.0], s)
    assert len(s_kept) == len(vals) >= 8
    assert np.all(np.diff(vals) > 0)
    # supporting slope is probed near the corner, which biases the fit
    # upward by O(s_min/s); allow a generous band around 2
    assert 1.7 <= slope <= 2.5


def test_corner_growth_needs_enough_samples(quad_iso):
    with pytest.raises(AnalysisError):
        corner_growth(quad_iso, [-1, -1], [1, 1], [0.1, 0.2],
                      value_floor=1e9)


def test_fit_loglog_and_bootstrap():
    rng = np.random.default_rng(13)
    x = np.geomspace(0.01, 1.0, 40)
    y = 3.0 * x ** 1.7 * np.exp(0.01 * rng.standard_normal(40))
    slope = fit_loglog(x, y)
    assert slope == pytest.approx(1.7, abs=0.02)
    lo, hi = bootstrap_slope_ci(x, y, seed=5)
    assert lo <= 1.7 <= hi
    assert hi - lo < 0.1
