"""Backend agreement: the numba kernels and the pure-numpy fallbacks
must produce identical results on the same inputs."""

import numpy as np
import pytest

from otreg import kernels
from otreg.geometry import ConvexPolygon
from otreg.kernels import _numpy as knp
from otreg.solver import _neighbor_graph, _raw_cells, sample_target

try:
    from otreg.kernels import _numba as knb
    HAVE_NUMBA = True
except ImportError:
    knb = None
    HAVE_NUMBA = False

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")

SQUARE = ConvexPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])


def _cell_inputs(n, seed, w_scale=0.01):
    cloud = sample_target(SQUARE, n, seed=seed, lloyd_iters=3)
    pts = cloud.points
    rng = np.random.default_rng(seed + 1)
    w = w_scale * rng.standard_normal(n)
    indptr, indices = _neighbor_graph(pts, w)
    ii = np.repeat(np.arange(n), np.diff(indptr))
    normals = np.ascontiguousarray(pts[indices] - pts[ii])
    p2 = np.sum(pts ** 2, axis=1)
    offsets = np.ascontiguousarray(
        0.5 * (p2[indices] - p2[ii] - w[indices] + w[ii]))
    dom = np.ascontiguousarray(SQUARE.vertices)
    maxv = len(dom) + int(np.diff(indptr).max()) + 4
    return normals, offsets, indptr, indices, dom, maxv, pts


@needs_numba
@pytest.mark.parametrize("n,seed", [(40, 0), (150, 1), (400, 2)])
def test_clip_cells_backends_agree(n, seed):
    args = _cell_inputs(n, seed)[:6]
    va, ea, nva, aa, ca = knb.clip_cells(*args)
    vb, eb, nvb, ab, cb = knp.clip_cells(*args)
    assert np.array_equal(nva, nvb)
    assert aa == pytest.approx(ab, abs=1e-14)
    assert ca == pytest.approx(cb, abs=1e-12)
    for i in range(n):
        m = nva[i]
        # summation order differs between the loop and the vectorized
        # path, so allow a few ulps
        assert va[i, :m] == pytest.approx(vb[i, :m], abs=1e-12)
        assert np.array_equal(ea[i, :m], eb[i, :m])


@needs_numba
def test_eval_argmax_backends_agree():
    rng = np.random.default_rng(7)
    slopes = rng.normal(size=(300, 2))
    inter = rng.normal(size=300)
    xs = rng.normal(size=(500, 2))
    va, aa = knb.eval_argmax(xs, slopes, inter)
    vb, ab = knp.eval_argmax(xs, slopes, inter)
    assert va == pytest.approx(vb, abs=1e-14)
    assert np.array_equal(aa, ab)


@needs_numba
def test_edge_lengths_backends_agree():
    normals, offsets, indptr, indices, dom, maxv, _ = _cell_inputs(120, 4)
    verts, elabels, nv, _, _ = knp.clip_cells(normals, offsets, indptr,
                                              indices, dom, maxv)
    ia, ja, la = knb.edge_lengths(verts, elabels, nv)
    ib, jb, lb = knp.edge_lengths(verts, elabels, nv)
    ka = np.lexsort((ja, ia))
    kb = np.lexsort((jb, ib))
    assert np.array_equal(ia[ka], ib[kb])
    assert np.array_equal(ja[ka], jb[kb])
    assert la[ka] == pytest.approx(lb[kb], abs=1e-14)


def test_selected_backend_is_valid():
    assert kernels.BACKEND in ("numba", "numpy")


def test_numpy_clip_cells_tiles_domain():
    # with uniform weights every site owns a cell and the cells tile
    # the square
    normals, offsets, indptr, indices, dom, maxv, _ = _cell_inputs(
        80, 9, w_scale=0.0)
    _, _, nv, areas, _ = knp.clip_cells(normals, offsets, indptr, indices,
                                        dom, maxv)
    assert np.all(nv >= 3)
    assert areas.sum() == pytest.approx(1.0, abs=1e-9)


def test_raw_cells_matches_direct_power_inequalities():
    # every reported cell vertex satisfies the defining power inequalities
    cloud = sample_target(SQUARE, 60, seed=3, lloyd_iters=2)
    pts = cloud.points
    rng = np.random.default_rng(5)
    w = 0.02 * rng.standard_normal(60)
    verts, elabels, nv, areas, _ = _raw_cells(SQUARE, pts, w)
    p2 = np.sum(pts ** 2, axis=1)
    for i in range(60):
        v = verts[i, : nv[i]]
        pw = np.sum(v ** 2, axis=1)[:, None] - 2 * v @ pts.T + p2 - w
        own = pw[:, i]
        assert np.all(own <= pw.min(axis=1) + 1e-9)
