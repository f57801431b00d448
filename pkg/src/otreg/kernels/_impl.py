"""Hot kernels, written in an njit-compilable style.

These functions are compiled with numba by default; the pure-numpy
fallback lives in ``_numpy.py`` and implements the same API.  Keep the
signatures array-only.
"""

import numpy as np


def clip_cells(normals, offsets, indptr, labels_j, domain, maxv):
    """Build power-diagram cells by half-plane clipping of the domain.

    Cell ``i`` is ``domain`` clipped by the half-planes
    ``x . normals[e] <= offsets[e]`` for ``e`` in
    ``indptr[i]:indptr[i+1]``; ``labels_j[e]`` is the global index of
    the neighbour generating the half-plane.

    Returns (verts, elabels, nv, areas, cents): padded vertex arrays,
    per-edge neighbour labels (-1 for domain edges), vertex counts,
    cell areas and centroids.  Empty cells have nv == 0.
    """
    n = indptr.shape[0] - 1
    md = domain.shape[0]
    verts = np.zeros((n, maxv, 2))
    elabels = np.full((n, maxv), -1, np.int64)
    nv = np.zeros(n, np.int64)
    areas = np.zeros(n)
    cents = np.zeros((n, 2))

    va = np.empty((maxv, 2))
    la = np.empty(maxv, np.int64)
    vb = np.empty((maxv, 2))
    lb = np.empty(maxv, np.int64)
    s = np.empty(maxv)

    for i in range(n):
        m = md
        for k in range(md):
            va[k, 0] = domain[k, 0]
            va[k, 1] = domain[k, 1]
            la[k] = -1
        empty = False
        for e in range(indptr[i], indptr[i + 1]):
            nx = normals[e, 0]
            ny = normals[e, 1]
            c = offsets[e]
            j = labels_j[e]
            anyin = False
            anyout = False
            for k in range(m):
                s[k] = va[k, 0] * nx + va[k, 1] * ny - c
                if s[k] > 0.0:
                    anyout = True
                else:
                    anyin = True
            if not anyout:
                continue
            if not anyin:
                empty = True
                break
            no = 0
            for k in range(m):
                k2 = k + 1 if k + 1 < m else 0
                sa = s[k]
                sb = s[k2]
                if sa <= 0.0:
                    vb[no, 0] = va[k, 0]
                    vb[no, 1] = va[k, 1]
                    lb[no] = la[k]
                    no += 1
                    if sb > 0.0:
                        t = sa / (sa - sb)
                        vb[no, 0] = va[k, 0] + t * (va[k2, 0] - va[k, 0])
                        vb[no, 1] = va[k, 1] + t * (va[k2, 1] - va[k, 1])
                        lb[no] = j
                        no += 1
                elif sb <= 0.0:
                    t = sa / (sa - sb)
                    vb[no, 0] = va[k, 0] + t * (va[k2, 0] - va[k, 0])
                    vb[no, 1] = va[k, 1] + t * (va[k2, 1] - va[k, 1])
                    lb[no] = la[k]
                    no += 1
            if no < 3:
                empty = True
                break
            va, vb = vb, va
            la, lb = lb, la
            m = no
        if empty:
            continue
        a2 = 0.0
        cx = 0.0
        cy = 0.0
        for k in range(m):
            k2 = k + 1 if k + 1 < m else 0
            cross = va[k, 0] * va[k2, 1] - va[k2, 0] * va[k, 1]
            a2 += cross
            cx += (va[k, 0] + va[k2, 0]) * cross
            cy += (va[k, 1] + va[k2, 1]) * cross
        if a2 <= 0.0:
            continue
        areas[i] = 0.5 * a2
        cents[i, 0] = cx / (3.0 * a2)
        cents[i, 1] = cy / (3.0 * a2)
        nv[i] = m
        for k in range(m):
            verts[i, k, 0] = va[k, 0]
            verts[i, k, 1] = va[k, 1]
            elabels[i, k] = la[k]
    return verts, elabels, nv, areas, cents


def eval_argmax(xs, slopes, intercepts):
    """Pointwise max of affine pieces: value and achieving index."""
    m = xs.shape[0]
    n = slopes.shape[0]
    vals = np.empty(m)
    arg = np.empty(m, np.int64)
    for a in range(m):
        x0 = xs[a, 0]
        x1 = xs[a, 1]
        best = -1.0e300
        bi = -1
        for i in range(n):
            v = x0 * slopes[i, 0] + x1 * slopes[i, 1] - intercepts[i]
            if v > best:
                best = v
                bi = i
        vals[a] = best
        arg[a] = bi
    return vals, arg


def edge_lengths(verts, elabels, nv):
    """Per-cell shared-edge lengths keyed by neighbour label.

    Returns flat (cell_i, neighbour_j, length) arrays covering every
    polygon edge whose label is a neighbour index (>= 0).
    """
    n = nv.shape[0]
    total = 0
    for i in range(n):
        total += nv[i]
    out_i = np.empty(total, np.int64)
    out_j = np.empty(total, np.int64)
    out_len = np.empty(total)
    cnt = 0
    for i in range(n):
        m = nv[i]
        for k in range(m):
            j = elabels[i, k]
            if j < 0:
                continue
            k2 = k + 1 if k + 1 < m else 0
            dx = verts[i, k2, 0] - verts[i, k, 0]
            dy = verts[i, k2, 1] - verts[i, k, 1]
            out_i[cnt] = i
            out_j[cnt] = j
            out_len[cnt] = (dx * dx + dy * dy) ** 0.5
            cnt += 1
    return out_i[:cnt], out_j[:cnt], out_len[:cnt]
