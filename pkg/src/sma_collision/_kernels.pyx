# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner kernels; see ``_kernels_py`` for the reference versions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

cdef enum:
    FACE_INTERIOR = 0
    FACE_X0 = 1
    FACE_Y0 = 2
    FACE_HYP = 3
    VERTEX_00 = 4
    VERTEX_10 = 5
    VERTEX_01 = 6


cdef inline signed char _project(double x, double y, double* px, double* py) noexcept nogil:
    cdef double t
    if x + y > 1.0:
        t = 0.5 * (x - y + 1.0)
        if t <= 0.0:
            px[0] = 0.0
            py[0] = 1.0
            return VERTEX_01
        if t >= 1.0:
            px[0] = 1.0
            py[0] = 0.0
            return VERTEX_10
        px[0] = t
        py[0] = 1.0 - t
        return FACE_HYP
    if x < 0.0 and y < 0.0:
        px[0] = 0.0
        py[0] = 0.0
        return VERTEX_00
    if x < 0.0:
        px[0] = 0.0
        py[0] = y if y < 1.0 else 1.0
        return VERTEX_01 if py[0] >= 1.0 else FACE_X0
    if y < 0.0:
        px[0] = x if x < 1.0 else 1.0
        py[0] = 0.0
        return VERTEX_10 if px[0] >= 1.0 else FACE_Y0
    px[0] = x
    py[0] = y
    return FACE_INTERIOR


def project_triangle(points):
    cdef double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0], k
    out = np.empty((n, 2), dtype=np.float64)
    face = np.empty(n, dtype=np.int8)
    cdef double[:, ::1] o = out
    cdef signed char[::1] f = face
    with nogil:
        for k in range(n):
            f[k] = _project(pts[k, 0], pts[k, 1], &o[k, 0], &o[k, 1])
    return out, face


cdef inline double _qp_value(double* H, double g0, double g1, double y0, double y1) noexcept nogil:
    return 0.5 * (H[0] * y0 * y0 + 2.0 * H[1] * y0 * y1 + H[3] * y1 * y1) - g0 * y0 - g1 * y1


cdef inline void _local_qp(double* H, double g0, double g1, double* y0, double* y1) noexcept nogil:
    cdef double det = H[0] * H[3] - H[1] * H[2]
    cdef double a = (H[3] * g0 - H[1] * g1) / det
    cdef double b = (H[0] * g1 - H[2] * g0) / det
    cdef double px[3]
    cdef double py[3]
    cdef double dx[3]
    cdef double dy[3]
    cdef double best = 0.0, val, t, hd0, hd1, dhd, hp0, hp1, cx, cy
    cdef int e
    if a >= 0.0 and b >= 0.0 and a + b <= 1.0:
        y0[0] = a
        y1[0] = b
        return
    px[0] = 0.0; py[0] = 0.0; dx[0] = 1.0; dy[0] = 0.0
    px[1] = 0.0; py[1] = 0.0; dx[1] = 0.0; dy[1] = 1.0
    px[2] = 1.0; py[2] = 0.0; dx[2] = -1.0; dy[2] = 1.0
    for e in range(3):
        hd0 = H[0] * dx[e] + H[1] * dy[e]
        hd1 = H[2] * dx[e] + H[3] * dy[e]
        dhd = dx[e] * hd0 + dy[e] * hd1
        hp0 = H[0] * px[e] + H[1] * py[e]
        hp1 = H[2] * px[e] + H[3] * py[e]
        t = (dx[e] * (g0 - hp0) + dy[e] * (g1 - hp1)) / dhd
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        cx = px[e] + t * dx[e]
        cy = py[e] + t * dy[e]
        val = _qp_value(H, g0, g1, cx, cy)
        if e == 0 or val < best:
            best = val
            y0[0] = cx
            y1[0] = cy


def local_qp(H, g):
    cdef double h[4]
    cdef double y0, y1
    for k in range(4):
        h[k] = H[k]
    _local_qp(h, g[0], g[1], &y0, &y1)
    return y0, y1


def pgs_sweeps(indptr_, indices_, data_, coupling, rhs_, chi_, int max_sweeps, double tol):
    cdef long long[::1] indptr = np.ascontiguousarray(indptr_, dtype=np.int64)
    cdef long long[::1] indices = np.ascontiguousarray(indices_, dtype=np.int64)
    cdef double[::1] data = np.ascontiguousarray(data_, dtype=np.float64)
    cdef double[:, ::1] rhs = np.ascontiguousarray(rhs_, dtype=np.float64)
    cdef double[:, ::1] chi = chi_
    cm = np.ascontiguousarray(coupling, dtype=np.float64).ravel()
    cdef double m0 = cm[0], m1 = cm[1], m2 = cm[2], m3 = cm[3]
    cdef Py_ssize_t n = indptr.shape[0] - 1, i, j, k
    cdef int sweeps = 0, s
    cdef double change = np.inf, s0, s1, sii, r0, r1, c0, c1, g0, g1, y0, y1
    cdef double H[4]
    with nogil:
        for s in range(1, max_sweeps + 1):
            sweeps = s
            change = 0.0
            for i in range(n):
                s0 = 0.0
                s1 = 0.0
                sii = 0.0
                for k in range(indptr[i], indptr[i + 1]):
                    j = indices[k]
                    s0 = s0 + data[k] * chi[j, 0]
                    s1 = s1 + data[k] * chi[j, 1]
                    if j == i:
                        sii = data[k]
                r0 = rhs[i, 0] - (m0 * s0 + m1 * s1)
                r1 = rhs[i, 1] - (m2 * s0 + m3 * s1)
                H[0] = sii * m0
                H[1] = sii * m1
                H[2] = sii * m2
                H[3] = sii * m3
                c0 = chi[i, 0]
                c1 = chi[i, 1]
                g0 = r0 + H[0] * c0 + H[1] * c1
                g1 = r1 + H[2] * c0 + H[3] * c1
                _local_qp(H, g0, g1, &y0, &y1)
                if fabs(y0 - c0) > change:
                    change = fabs(y0 - c0)
                if fabs(y1 - c1) > change:
                    change = fabs(y1 - c1)
                chi[i, 0] = y0
                chi[i, 1] = y1
            if change <= tol:
                break
    return sweeps, change


def kkt_grid_min(long long i_lo, long long i_hi, long long j_lo, long long j_hi, long long n,
                 coupling, double c, double chi2m, double chi3m, double T_minus, double diss,
                 double l_a, double C, double T0, double gamma):
    cm = np.ascontiguousarray(coupling, dtype=np.float64).ravel()
    cdef double m0 = cm[0], m1 = cm[1], m2 = cm[2], m3 = cm[3]
    cdef long long i, j, bi = -1, bj = -1
    cdef double x2, x3, T, d2, d3, drive, g2, g3, px, py, res, best = 0.0
    cdef double a = l_a / T0
    if i_lo < 0:
        i_lo = 0
    if j_lo < 0:
        j_lo = 0
    if i_hi > n:
        i_hi = n
    if j_hi > n:
        j_hi = n
    with nogil:
        for i in range(i_lo, i_hi + 1):
            x2 = <double>i / <double>n
            for j in range(j_lo, j_hi + 1):
                if i + j > n:
                    break
                x3 = <double>j / <double>n
                T = T_minus + (diss - l_a * (x3 - chi3m)) / C
                d2 = x2 - chi2m
                d3 = x3 - chi3m
                drive = a * (T - T0)
                g2 = c * (m0 * d2 + m1 * d3)
                g3 = c * (m2 * d2 + m3 * d3) - drive
                _project(x2 - g2 / gamma, x3 - g3 / gamma, &px, &py)
                res = (x2 - px) * (x2 - px) + (x3 - py) * (x3 - py)
                if bi < 0 or res < best:
                    best = res
                    bi = i
                    bj = j
    return int(bi), int(bj), float(best)
