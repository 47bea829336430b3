"""NumPy implementations of the hot kernels.

Signatures match the compiled ``_kernels`` module exactly; ``kernels`` picks
one of the two at import time.
"""
import numpy as np

_CHUNK = 1 << 16


def grid_lookup(occ, shape, lower, widths, pts):
    pts = np.asarray(pts, dtype=float)
    idx = np.floor((pts - lower) / widths).astype(np.int64)
    inside = np.all((idx >= 0) & (idx < shape), axis=1)
    out = np.zeros(pts.shape[0])
    if np.any(inside):
        flat = np.ravel_multi_index(tuple(idx[inside].T), tuple(int(s) for s in shape))
        out[inside] = occ[flat]
    return out


def interp_linear(values, shape, lower, h, pts):
    pts = np.asarray(pts, dtype=float)
    m, D = pts.shape
    shape = np.asarray(shape, dtype=np.int64)
    pos = (pts - lower) / h
    inside = np.all((pos >= 0) & (pos <= shape - 1), axis=1)
    i0 = np.minimum(np.floor(pos).astype(np.int64), shape - 2)
    i0 = np.maximum(i0, 0)
    frac = pos - i0
    out = np.zeros(m)
    strides = np.ones(D, dtype=np.int64)
    for a in range(D - 2, -1, -1):
        strides[a] = strides[a + 1] * shape[a + 1]
    base = (np.clip(i0, 0, None) * strides).sum(axis=1)
    for corner in range(1 << D):
        w = np.ones(m)
        off = 0
        for a in range(D):
            if (corner >> (D - 1 - a)) & 1:
                w = w * frac[:, a]
                off += strides[a]
            else:
                w = w * (1.0 - frac[:, a])
        idx = np.where(inside, base + off, 0)
        out += w * values[idx]
    out[~inside] = 0.0
    return out


def vandermonde_abs_sum(phi, counts, weights):
    """Sum over index tuples of prod_j weights[j, i_j] * |prod_k det(phi[k, j, i_j, :])|."""
    nprime, A, _, _ = phi.shape
    counts = tuple(int(c) for c in counts)
    total = int(np.prod(counts))
    acc = []
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        idx = np.unravel_index(flat, counts)
        w = np.ones(flat.size)
        for j in range(A):
            w = w * weights[j, idx[j]]
        v = np.ones(flat.size)
        for k in range(nprime):
            mats = np.stack([phi[k, j, idx[j], :] for j in range(A)], axis=1)
            v = v * np.linalg.det(mats)
        acc.append(np.sum(w * np.abs(v)))
    return float(np.sum(acc))
