"""Numpy fallback for the hot kernels (compiled twin: gdlayout._ext).

Both backends implement the same contract:

* crossing predicates return int8 masks with values 0 (no), 1 (yes) or
  2 (uncertain: the float filter could not decide; callers resolve those
  pairs with exact rational arithmetic),
* stress / edge-length batch kernels return the mean (stress) or raw
  per-pair data and accumulate scaled gradients into a dense buffer.

Segments are (N, 4) float arrays [x1, y1, x2, y2]; edge node ids (N, 2) int.
"""

from __future__ import annotations

import numpy as np

# Shewchuk-style orient2d filter constant for float64
_ORIENT_EPS = 3.3306690738754716e-16

BACKEND = "python"


def _orient(ax, ay, bx, by, cx, cy):
    """Vectorized filtered orientation: (sign int8, uncertain bool)."""
    detl = (bx - ax) * (cy - ay)
    detr = (by - ay) * (cx - ax)
    det = detl - detr
    sign = np.sign(det).astype(np.int8)
    # certain when the two products have opposite signs or either is zero;
    # otherwise trust the sign only outside the rounding-error bound
    risky = detl * detr > 0
    uncertain = risky & (np.abs(det) <= _ORIENT_EPS * (np.abs(detl) + np.abs(detr)))
    return sign, uncertain


def _between_strict(px, py, qx, qy, rx, ry):
    """Assuming r collinear with pq: r inside the closed box and not an
    endpoint (i.e. strictly interior to the segment)."""
    inside = (
        (np.minimum(px, qx) <= rx)
        & (rx <= np.maximum(px, qx))
        & (np.minimum(py, qy) <= ry)
        & (ry <= np.maximum(py, qy))
    )
    at_end = ((rx == px) & (ry == py)) | ((rx == qx) & (ry == qy))
    return inside & ~at_end


def cross_mask(sa: np.ndarray, sb: np.ndarray) -> np.ndarray:
    """Properly-crossing test for N segment pairs (policy: shared endpoint
    false; endpoint-on-interior true; collinear positive-length overlap true;
    zero-length segments never cross)."""
    ax, ay, bx, by = sa[:, 0], sa[:, 1], sa[:, 2], sa[:, 3]
    cx, cy, dx, dy = sb[:, 0], sb[:, 1], sb[:, 2], sb[:, 3]

    o1, u1 = _orient(ax, ay, bx, by, cx, cy)
    o2, u2 = _orient(ax, ay, bx, by, dx, dy)
    o3, u3 = _orient(cx, cy, dx, dy, ax, ay)
    o4, u4 = _orient(cx, cy, dx, dy, bx, by)
    uncertain = u1 | u2 | u3 | u4

    degenerate = ((ax == bx) & (ay == by)) | ((cx == dx) & (cy == dy))
    shared = (
        ((ax == cx) & (ay == cy))
        | ((ax == dx) & (ay == dy))
        | ((bx == cx) & (by == cy))
        | ((bx == dx) & (by == dy))
    )

    proper = (o1.astype(np.int16) * o2 < 0) & (o3.astype(np.int16) * o4 < 0)
    allzero = (o1 == 0) & (o2 == 0) & (o3 == 0) & (o4 == 0)

    touch = (
        ((o1 == 0) & _between_strict(ax, ay, bx, by, cx, cy))
        | ((o2 == 0) & _between_strict(ax, ay, bx, by, dx, dy))
        | ((o3 == 0) & _between_strict(cx, cy, dx, dy, ax, ay))
        | ((o4 == 0) & _between_strict(cx, cy, dx, dy, bx, by))
    )

    # collinear overlap of positive length, measured on the dominant axis
    use_y = ax == bx
    lo1 = np.where(use_y, np.minimum(ay, by), np.minimum(ax, bx))
    hi1 = np.where(use_y, np.maximum(ay, by), np.maximum(ax, bx))
    lo2 = np.where(use_y, np.minimum(cy, dy), np.minimum(cx, dx))
    hi2 = np.where(use_y, np.maximum(cy, dy), np.maximum(cx, dx))
    overlap = np.maximum(lo1, lo2) < np.minimum(hi1, hi2)

    yes = np.where(allzero, overlap, proper | touch)
    yes &= ~shared & ~degenerate

    out = yes.astype(np.int8)
    out[uncertain & ~shared & ~degenerate] = 2
    return out


def pairs_cross_bruteforce(segs: np.ndarray, enodes: np.ndarray):
    """All-pairs crossing test over m segments, skipping pairs that share a
    node id. Returns (crossing_pairs (K,2), uncertain_pairs (U,2)) of segment
    indices i < j."""
    m = len(segs)
    if m < 2:
        empty = np.empty((0, 2), dtype=np.int64)
        return empty, empty.copy()
    ii, jj = np.triu_indices(m, k=1)
    a, b = enodes[ii], enodes[jj]
    disjoint = (
        (a[:, 0] != b[:, 0])
        & (a[:, 0] != b[:, 1])
        & (a[:, 1] != b[:, 0])
        & (a[:, 1] != b[:, 1])
    )
    ii, jj = ii[disjoint], jj[disjoint]
    mask = cross_mask(segs[ii], segs[jj])
    pairs = np.stack([ii, jj], axis=1)
    return pairs[mask == 1], pairs[mask == 2]


def cross_vs(segs_a, nodes_a, segs_b, nodes_b):
    """Crossing tests of every segment in A against every segment in B
    (callers pass disjoint edge sets). Returns (certain count,
    uncertain_pairs (U,2) of (a_index, b_index))."""
    na, nb = len(segs_a), len(segs_b)
    if na == 0 or nb == 0:
        return 0, np.empty((0, 2), dtype=np.int64)
    ii = np.repeat(np.arange(na), nb)
    jj = np.tile(np.arange(nb), na)
    a, b = nodes_a[ii], nodes_b[jj]
    disjoint = (
        (a[:, 0] != b[:, 0])
        & (a[:, 0] != b[:, 1])
        & (a[:, 1] != b[:, 0])
        & (a[:, 1] != b[:, 1])
    )
    ii, jj = ii[disjoint], jj[disjoint]
    mask = cross_mask(segs_a[ii], segs_b[jj])
    uncertain = np.stack([ii[mask == 2], jj[mask == 2]], axis=1)
    return int(np.count_nonzero(mask == 1)), uncertain


def _fallback_direction(i, j):
    """Deterministic pseudo-random unit vector for coincident endpoints,
    seeded by the node pair (subgradient choice; mirrored in the compiled
    kernel)."""
    h = (np.uint64(i) * np.uint64(2654435761) + np.uint64(j) * np.uint64(40503) + np.uint64(12345)) & np.uint64(0xFFFF)
    ang = 2.0 * np.pi * (np.asarray(h, dtype=np.float64) / 65536.0)
    return np.cos(ang), np.sin(ang)


def stress_batch(X, I, J, D, out, scale) -> float:
    """Mean weighted-stress over the batch; accumulates scale * d(mean)/dX
    into `out`. Weights are D^-2."""
    diff = X[I] - X[J]
    dist = np.hypot(diff[:, 0], diff[:, 1])
    tiny = dist < 1e-12
    if np.any(tiny):
        ux, uy = _fallback_direction(I[tiny], J[tiny])
        unit = np.stack([ux, uy], axis=1)
        safe = np.where(tiny, 1.0, dist)
        u = diff / safe[:, None]
        u[tiny] = unit
    else:
        u = diff / dist[:, None]
    w = 1.0 / (D * D)
    res = dist - D
    m = len(I)
    loss = float(np.mean(w * res * res))
    coef = (scale * 2.0 / m) * (w * res)
    g = coef[:, None] * u
    np.add.at(out, I, g)
    np.add.at(out, J, -g)
    return loss


def edge_len_batch(X, I, J, L, out, scale) -> float:
    """Mean relative squared edge-length deviation; gradient like
    stress_batch."""
    diff = X[I] - X[J]
    dist = np.hypot(diff[:, 0], diff[:, 1])
    tiny = dist < 1e-12
    if np.any(tiny):
        ux, uy = _fallback_direction(I[tiny], J[tiny])
        unit = np.stack([ux, uy], axis=1)
        safe = np.where(tiny, 1.0, dist)
        u = diff / safe[:, None]
        u[tiny] = unit
    else:
        u = diff / dist[:, None]
    rel = (dist - L) / L
    m = len(I)
    loss = float(np.mean(rel * rel))
    coef = (scale * 2.0 / m) * (rel / L)
    g = coef[:, None] * u
    np.add.at(out, I, g)
    np.add.at(out, J, -g)
    return loss
