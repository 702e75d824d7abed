# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot numeric kernels (see _kernels_py for contracts)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor, ceil, INFINITY

cnp.import_array()


def distance_field(double ox, double oy, double cell, int nx, int ny,
                   cnp.ndarray[cnp.float64_t, ndim=2] segs, double radius):
    cdef cnp.ndarray[cnp.float32_t, ndim=2] field = \
        np.full((ny, nx), np.inf, dtype=np.float32)
    cdef int k, i, j, i0, i1, j0, j1
    cdef double ax, ay, bx, by, dx, dy, L2, px, py, tp, ddx, ddy, d
    cdef double xlo, xhi, ylo, yhi
    for k in range(segs.shape[0]):
        ax = segs[k, 0]; ay = segs[k, 1]; bx = segs[k, 2]; by = segs[k, 3]
        xlo = (ax if ax < bx else bx) - radius
        xhi = (ax if ax > bx else bx) + radius
        ylo = (ay if ay < by else by) - radius
        yhi = (ay if ay > by else by) + radius
        i0 = <int>floor((xlo - ox) / cell)
        i1 = <int>ceil((xhi - ox) / cell) + 1
        j0 = <int>floor((ylo - oy) / cell)
        j1 = <int>ceil((yhi - oy) / cell) + 1
        if i0 < 0: i0 = 0
        if j0 < 0: j0 = 0
        if i1 > nx: i1 = nx
        if j1 > ny: j1 = ny
        dx = bx - ax; dy = by - ay
        L2 = dx * dx + dy * dy
        for j in range(j0, j1):
            py = oy + cell * j - ay
            for i in range(i0, i1):
                px = ox + cell * i - ax
                if L2 == 0.0:
                    ddx = px; ddy = py
                else:
                    tp = (px * dx + py * dy) / L2
                    if tp < 0.0: tp = 0.0
                    elif tp > 1.0: tp = 1.0
                    ddx = px - tp * dx; ddy = py - tp * dy
                d = sqrt(ddx * ddx + ddy * ddy)
                if d < field[j, i]:
                    field[j, i] = <float>d
    return field


def polyval2(cnp.ndarray[cnp.int64_t, ndim=1] pa,
             cnp.ndarray[cnp.int64_t, ndim=1] pb,
             cnp.ndarray[cnp.float64_t, ndim=1] coef,
             x, y):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xf = \
        np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yf = \
        np.ascontiguousarray(y, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros_like(xf)
    cdef Py_ssize_t npt = xf.shape[0], nt = pa.shape[0]
    cdef Py_ssize_t i, k
    cdef int a, b, e
    cdef double xv, yv, mono, acc
    for i in range(npt):
        xv = xf[i]; yv = yf[i]
        acc = 0.0
        for k in range(nt):
            mono = coef[k]
            a = <int>pa[k]; b = <int>pb[k]
            for e in range(a):
                mono *= xv
            for e in range(b):
                mono *= yv
            acc += mono
        out[i] = acc
    shp = np.asarray(x).shape
    return out.reshape(shp)


def directed_hausdorff(cnp.ndarray[cnp.float64_t, ndim=2] a,
                       cnp.ndarray[cnp.float64_t, ndim=2] b):
    cdef Py_ssize_t i, j, na = a.shape[0], nb = b.shape[0]
    cdef double worst = 0.0, best, d2, dx, dy
    for i in range(na):
        best = INFINITY
        for j in range(nb):
            dx = a[i, 0] - b[j, 0]
            dy = a[i, 1] - b[j, 1]
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
                if best <= worst:
                    break
        if best > worst:
            worst = best
    return sqrt(worst)


def pointset_min_dist(cnp.ndarray[cnp.float64_t, ndim=2] a,
                      cnp.ndarray[cnp.float64_t, ndim=2] b):
    cdef Py_ssize_t i, j, na = a.shape[0], nb = b.shape[0]
    cdef double best = INFINITY, d2, dx, dy
    for i in range(na):
        for j in range(nb):
            dx = a[i, 0] - b[j, 0]
            dy = a[i, 1] - b[j, 1]
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
    return sqrt(best)


cdef inline double _cross(double ox, double oy, double ux, double uy,
                          double vx, double vy) noexcept:
    return (ux - ox) * (vy - oy) - (uy - oy) * (vx - ox)


def self_intersects(cnp.ndarray[cnp.float64_t, ndim=2] pts):
    cdef Py_ssize_t n = pts.shape[0]
    if n < 4:
        return 0
    cdef Py_ssize_t i, j, jhi, i2, j2
    cdef double d1, d2, d3, d4
    for i in range(n - 2):
        jhi = n if i > 0 else n - 1
        i2 = (i + 1) % n
        for j in range(i + 2, jhi):
            j2 = (j + 1) % n
            d1 = _cross(pts[i, 0], pts[i, 1], pts[i2, 0], pts[i2, 1], pts[j, 0], pts[j, 1])
            d2 = _cross(pts[i, 0], pts[i, 1], pts[i2, 0], pts[i2, 1], pts[j2, 0], pts[j2, 1])
            d3 = _cross(pts[j, 0], pts[j, 1], pts[j2, 0], pts[j2, 1], pts[i, 0], pts[i, 1])
            d4 = _cross(pts[j, 0], pts[j, 1], pts[j2, 0], pts[j2, 1], pts[i2, 0], pts[i2, 1])
            if d1 * d2 < 0 and d3 * d4 < 0:
                return 1
    return 0
