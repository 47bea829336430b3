# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.  Same signatures and semantics as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, fabs

cnp.import_array()

DEF MAXDIM = 16


def grid_lookup(const double[::1] occ, const cnp.int64_t[::1] shape,
                const double[::1] lower, const double[::1] widths,
                const double[:, ::1] pts):
    cdef Py_ssize_t m = pts.shape[0], D = pts.shape[1], i, a
    cdef cnp.int64_t idx, flat
    cdef bint ok
    out = np.zeros(m)
    cdef double[::1] o = out
    for i in range(m):
        flat = 0
        ok = True
        for a in range(D):
            idx = <cnp.int64_t> floor((pts[i, a] - lower[a]) / widths[a])
            if idx < 0 or idx >= shape[a]:
                ok = False
                break
            flat = flat * shape[a] + idx
        if ok:
            o[i] = occ[flat]
    return out


def interp_linear(const double[::1] values, const cnp.int64_t[::1] shape,
                  const double[::1] lower, const double[::1] h,
                  const double[:, ::1] pts):
    cdef Py_ssize_t m = pts.shape[0], D = pts.shape[1], i, a, corner
    cdef cnp.int64_t strides[MAXDIM]
    cdef cnp.int64_t i0[MAXDIM]
    cdef double frac[MAXDIM]
    cdef double pos, w, acc
    cdef cnp.int64_t base, off
    cdef bint inside
    if D > MAXDIM:
        raise ValueError("too many dimensions for the compiled kernel")
    strides[D - 1] = 1
    for a in range(D - 2, -1, -1):
        strides[a] = strides[a + 1] * shape[a + 1]
    out = np.zeros(m)
    cdef double[::1] o = out
    for i in range(m):
        inside = True
        base = 0
        for a in range(D):
            pos = (pts[i, a] - lower[a]) / h[a]
            if pos < 0 or pos > shape[a] - 1:
                inside = False
                break
            i0[a] = <cnp.int64_t> floor(pos)
            if i0[a] > shape[a] - 2:
                i0[a] = shape[a] - 2
            frac[a] = pos - i0[a]
            base += i0[a] * strides[a]
        if not inside:
            continue
        acc = 0.0
        for corner in range(1 << D):
            w = 1.0
            off = 0
            for a in range(D):
                if (corner >> (D - 1 - a)) & 1:
                    w *= frac[a]
                    off += strides[a]
                else:
                    w *= 1.0 - frac[a]
            acc += w * values[base + off]
        o[i] = acc
    return out


cdef double _lu_det(double* a, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, j, k, piv
    cdef double det = 1.0, best, t, f
    for k in range(n):
        piv = k
        best = fabs(a[k * n + k])
        for i in range(k + 1, n):
            if fabs(a[i * n + k]) > best:
                best = fabs(a[i * n + k])
                piv = i
        if best == 0.0:
            return 0.0
        if piv != k:
            for j in range(n):
                t = a[k * n + j]
                a[k * n + j] = a[piv * n + j]
                a[piv * n + j] = t
            det = -det
        det *= a[k * n + k]
        for i in range(k + 1, n):
            f = a[i * n + k] / a[k * n + k]
            for j in range(k + 1, n):
                a[i * n + j] -= f * a[k * n + j]
    return det


def vandermonde_abs_sum(const double[:, :, :, ::1] phi, const cnp.int64_t[::1] counts,
                        const double[:, ::1] weights):
    cdef Py_ssize_t nprime = phi.shape[0], A = phi.shape[1], j, k, m
    cdef cnp.int64_t idx[MAXDIM]
    cdef double mat[MAXDIM * MAXDIM]
    cdef double total = 0.0, w, v
    cdef bint done = False
    if A > MAXDIM:
        raise ValueError("family too large for the compiled kernel")
    for j in range(A):
        idx[j] = 0
        if counts[j] == 0:
            return 0.0
    with nogil:
        while not done:
            w = 1.0
            for j in range(A):
                w *= weights[j, idx[j]]
            v = 1.0
            for k in range(nprime):
                for j in range(A):
                    for m in range(A):
                        mat[j * A + m] = phi[k, j, idx[j], m]
                v *= _lu_det(mat, A)
            total += w * fabs(v)
            j = A - 1
            while j >= 0:
                idx[j] += 1
                if idx[j] < counts[j]:
                    break
                idx[j] = 0
                j -= 1
            if j < 0:
                done = True
    return total
