"""Pure-numpy fallback implementations of the hot kernels.

Same API as ``_impl`` (which is what numba compiles); selected when the
``OTREG_BACKEND=numpy`` environment flag is set or numba is missing.
"""

import numpy as np


def clip_cells(normals, offsets, indptr, labels_j, domain, maxv):
    n = indptr.shape[0] - 1
    md = domain.shape[0]
    verts = np.zeros((n, maxv, 2))
    elabels = np.full((n, maxv), -1, np.int64)
    nv = np.zeros(n, np.int64)
    areas = np.zeros(n)
    cents = np.zeros((n, 2))

    for i in range(n):
        v = domain
        lab = np.full(md, -1, np.int64)
        empty = False
        for e in range(indptr[i], indptr[i + 1]):
            s = v @ normals[e] - offsets[e]
            if np.all(s <= 0.0):
                continue
            if np.all(s > 0.0):
                empty = True
                break
            m = len(v)
            nxt = np.arange(1, m + 1) % m
            out_v = []
            out_l = []
            j = labels_j[e]
            for k in range(m):
                sa, sb = s[k], s[nxt[k]]
                if sa <= 0.0:
                    out_v.append(v[k])
                    out_l.append(lab[k])
                    if sb > 0.0:
                        t = sa / (sa - sb)
                        out_v.append(v[k] + t * (v[nxt[k]] - v[k]))
                        out_l.append(j)
                elif sb <= 0.0:
                    t = sa / (sa - sb)
                    out_v.append(v[k] + t * (v[nxt[k]] - v[k]))
                    out_l.append(lab[k])
            if len(out_v) < 3:
                empty = True
                break
            v = np.array(out_v)
            lab = np.array(out_l, np.int64)
        if empty:
            continue
        m = len(v)
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        a2 = cross.sum()
        if a2 <= 0.0:
            continue
        areas[i] = 0.5 * a2
        cents[i, 0] = np.sum((v[:, 0] + w[:, 0]) * cross) / (3.0 * a2)
        cents[i, 1] = np.sum((v[:, 1] + w[:, 1]) * cross) / (3.0 * a2)
        nv[i] = m
        verts[i, :m] = v
        elabels[i, :m] = lab
    return verts, elabels, nv, areas, cents


def eval_argmax(xs, slopes, intercepts, block: int = 512):
    m = xs.shape[0]
    vals = np.empty(m)
    arg = np.empty(m, np.int64)
    for a in range(0, m, block):
        chunk = xs[a:a + block] @ slopes.T - intercepts
        arg[a:a + block] = np.argmax(chunk, axis=1)
        vals[a:a + block] = chunk[np.arange(len(chunk)), arg[a:a + block]]
    return vals, arg


def edge_lengths(verts, elabels, nv):
    out_i, out_j, out_len = [], [], []
    for i in range(nv.shape[0]):
        m = nv[i]
        if m == 0:
            continue
        v = verts[i, :m]
        w = np.roll(v, -1, axis=0)
        lab = elabels[i, :m]
        keep = lab >= 0
        lens = np.hypot(*(w - v).T)
        out_i.append(np.full(int(keep.sum()), i, np.int64))
        out_j.append(lab[keep])
        out_len.append(lens[keep])
    if not out_i:
        e = np.empty(0, np.int64)
        return e, e.copy(), np.empty(0)
    return np.concatenate(out_i), np.concatenate(out_j), np.concatenate(out_len)
