# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels; contract and semantics identical to gdlayout._slow."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, cos, sin, fabs

cnp.import_array()

DEF ORIENT_EPS = 3.3306690738754716e-16
DEF TWO_PI = 6.283185307179586

BACKEND = "compiled"


cdef inline int _orient(double ax, double ay, double bx, double by,
                        double cx, double cy) nogil:
    """Filtered orientation sign: -1 / 0 / 1, or 9 when uncertain."""
    cdef double detl = (bx - ax) * (cy - ay)
    cdef double detr = (by - ay) * (cx - ax)
    cdef double det = detl - detr
    if detl * detr > 0.0:
        if fabs(det) <= ORIENT_EPS * (fabs(detl) + fabs(detr)):
            return 9
    if det > 0.0:
        return 1
    if det < 0.0:
        return -1
    return 0


cdef inline bint _between_strict(double px, double py, double qx, double qy,
                                 double rx, double ry) nogil:
    if rx < (px if px < qx else qx) or rx > (px if px > qx else qx):
        return False
    if ry < (py if py < qy else qy) or ry > (py if py > qy else qy):
        return False
    if rx == px and ry == py:
        return False
    if rx == qx and ry == qy:
        return False
    return True


cdef inline signed char _cross_one(double ax, double ay, double bx, double by,
                                   double cx, double cy, double dx, double dy) nogil:
    cdef int o1, o2, o3, o4
    cdef double lo1, hi1, lo2, hi2, t
    cdef bint allzero, overlap

    if (ax == bx and ay == by) or (cx == dx and cy == dy):
        return 0
    if (ax == cx and ay == cy) or (ax == dx and ay == dy) or \
       (bx == cx and by == cy) or (bx == dx and by == dy):
        return 0

    o1 = _orient(ax, ay, bx, by, cx, cy)
    o2 = _orient(ax, ay, bx, by, dx, dy)
    o3 = _orient(cx, cy, dx, dy, ax, ay)
    o4 = _orient(cx, cy, dx, dy, bx, by)
    if o1 == 9 or o2 == 9 or o3 == 9 or o4 == 9:
        return 2

    allzero = o1 == 0 and o2 == 0 and o3 == 0 and o4 == 0
    if allzero:
        if ax == bx:
            lo1 = ay if ay < by else by
            hi1 = ay if ay > by else by
            lo2 = cy if cy < dy else dy
            hi2 = cy if cy > dy else dy
        else:
            lo1 = ax if ax < bx else bx
            hi1 = ax if ax > bx else bx
            lo2 = cx if cx < dx else dx
            hi2 = cx if cx > dx else dx
        t = lo1 if lo1 > lo2 else lo2
        overlap = t < (hi1 if hi1 < hi2 else hi2)
        return 1 if overlap else 0

    if o1 * o2 < 0 and o3 * o4 < 0:
        return 1
    if o1 == 0 and _between_strict(ax, ay, bx, by, cx, cy):
        return 1
    if o2 == 0 and _between_strict(ax, ay, bx, by, dx, dy):
        return 1
    if o3 == 0 and _between_strict(cx, cy, dx, dy, ax, ay):
        return 1
    if o4 == 0 and _between_strict(cx, cy, dx, dy, bx, by):
        return 1
    return 0


def cross_mask(cnp.ndarray[cnp.float64_t, ndim=2] sa,
               cnp.ndarray[cnp.float64_t, ndim=2] sb):
    cdef Py_ssize_t n = sa.shape[0], k
    cdef cnp.ndarray[cnp.int8_t, ndim=1] out = np.empty(n, dtype=np.int8)
    for k in range(n):
        out[k] = _cross_one(sa[k, 0], sa[k, 1], sa[k, 2], sa[k, 3],
                            sb[k, 0], sb[k, 1], sb[k, 2], sb[k, 3])
    return out


def pairs_cross_bruteforce(cnp.ndarray[cnp.float64_t, ndim=2] segs,
                           cnp.ndarray[cnp.int64_t, ndim=2] enodes):
    cdef Py_ssize_t m = segs.shape[0], i, j
    cdef signed char r
    crossing = []
    uncertain = []
    for i in range(m):
        for j in range(i + 1, m):
            if enodes[i, 0] == enodes[j, 0] or enodes[i, 0] == enodes[j, 1] or \
               enodes[i, 1] == enodes[j, 0] or enodes[i, 1] == enodes[j, 1]:
                continue
            r = _cross_one(segs[i, 0], segs[i, 1], segs[i, 2], segs[i, 3],
                           segs[j, 0], segs[j, 1], segs[j, 2], segs[j, 3])
            if r == 1:
                crossing.append((i, j))
            elif r == 2:
                uncertain.append((i, j))
    if crossing:
        cr = np.array(crossing, dtype=np.int64)
    else:
        cr = np.empty((0, 2), dtype=np.int64)
    if uncertain:
        un = np.array(uncertain, dtype=np.int64)
    else:
        un = np.empty((0, 2), dtype=np.int64)
    return cr, un


def cross_vs(cnp.ndarray[cnp.float64_t, ndim=2] segs_a,
             cnp.ndarray[cnp.int64_t, ndim=2] nodes_a,
             cnp.ndarray[cnp.float64_t, ndim=2] segs_b,
             cnp.ndarray[cnp.int64_t, ndim=2] nodes_b):
    cdef Py_ssize_t na = segs_a.shape[0], nb = segs_b.shape[0], i, j
    cdef int count = 0
    cdef signed char r
    uncertain = []
    for i in range(na):
        for j in range(nb):
            if nodes_a[i, 0] == nodes_b[j, 0] or nodes_a[i, 0] == nodes_b[j, 1] or \
               nodes_a[i, 1] == nodes_b[j, 0] or nodes_a[i, 1] == nodes_b[j, 1]:
                continue
            r = _cross_one(segs_a[i, 0], segs_a[i, 1], segs_a[i, 2], segs_a[i, 3],
                           segs_b[j, 0], segs_b[j, 1], segs_b[j, 2], segs_b[j, 3])
            if r == 1:
                count += 1
            elif r == 2:
                uncertain.append((i, j))
    if uncertain:
        un = np.array(uncertain, dtype=np.int64)
    else:
        un = np.empty((0, 2), dtype=np.int64)
    return count, un


cdef inline void _fallback_dir(long i, long j, double* ux, double* uy) nogil:
    cdef unsigned long long h = (<unsigned long long>i * 2654435761ULL +
                                 <unsigned long long>j * 40503ULL + 12345ULL) & 0xFFFFULL
    cdef double ang = TWO_PI * (<double>h / 65536.0)
    ux[0] = cos(ang)
    uy[0] = sin(ang)


def stress_batch(cnp.ndarray[cnp.float64_t, ndim=2] X,
                 cnp.ndarray[cnp.int64_t, ndim=1] I,
                 cnp.ndarray[cnp.int64_t, ndim=1] J,
                 cnp.ndarray[cnp.float64_t, ndim=1] D,
                 cnp.ndarray[cnp.float64_t, ndim=2] out,
                 double scale):
    cdef Py_ssize_t m = I.shape[0], k
    cdef long i, j
    cdef double dx, dy, dist, w, res, loss = 0.0, coef, ux, uy
    for k in range(m):
        i = I[k]
        j = J[k]
        dx = X[i, 0] - X[j, 0]
        dy = X[i, 1] - X[j, 1]
        dist = sqrt(dx * dx + dy * dy)
        if dist < 1e-12:
            _fallback_dir(i, j, &ux, &uy)
        else:
            ux = dx / dist
            uy = dy / dist
        w = 1.0 / (D[k] * D[k])
        res = dist - D[k]
        loss += w * res * res
        coef = (scale * 2.0 / m) * w * res
        out[i, 0] += coef * ux
        out[i, 1] += coef * uy
        out[j, 0] -= coef * ux
        out[j, 1] -= coef * uy
    return loss / m


def edge_len_batch(cnp.ndarray[cnp.float64_t, ndim=2] X,
                   cnp.ndarray[cnp.int64_t, ndim=1] I,
                   cnp.ndarray[cnp.int64_t, ndim=1] J,
                   cnp.ndarray[cnp.float64_t, ndim=1] L,
                   cnp.ndarray[cnp.float64_t, ndim=2] out,
                   double scale):
    cdef Py_ssize_t m = I.shape[0], k
    cdef long i, j
    cdef double dx, dy, dist, rel, loss = 0.0, coef, ux, uy
    for k in range(m):
        i = I[k]
        j = J[k]
        dx = X[i, 0] - X[j, 0]
        dy = X[i, 1] - X[j, 1]
        dist = sqrt(dx * dx + dy * dy)
        if dist < 1e-12:
            _fallback_dir(i, j, &ux, &uy)
        else:
            ux = dx / dist
            uy = dy / dist
        rel = (dist - L[k]) / L[k]
        loss += rel * rel
        coef = (scale * 2.0 / m) * rel / L[k]
        out[i, 0] += coef * ux
        out[i, 1] += coef * uy
        out[j, 0] -= coef * ux
        out[j, 1] -= coef * uy
    return loss / m
