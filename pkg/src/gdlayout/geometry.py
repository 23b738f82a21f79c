"""Exact 2D geometry: crossing predicates, a Bentley-Ottmann sweep,
crossing/incident angles, rotated bounding boxes and 2-column singular values.

Crossing policy (shared by the scalar predicate, the array kernels and the
sweep; see also the brute-force oracle in tests):

* segments sharing an endpoint coordinate never cross,
* an endpoint of one segment strictly inside another counts as a crossing,
* collinear segments overlapping in more than one point count as one crossing,
* zero-length segments never cross.

Orientation signs are float-filtered and fall back to exact rational
arithmetic, so the sweep's event order and every reported pair are exact.
"""

from __future__ import annotations

import functools
import heapq
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .graphs import Graph

_ORIENT_EPS = 3.3306690738754716e-16


def check_layout(X: np.ndarray, n: int | None = None) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != 2:
        raise ValueError(f"layout must be (n, 2), got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("layout contains NaN or Inf")
    if n is not None and X.shape[0] != n:
        raise ValueError(f"layout has {X.shape[0]} rows, graph has {n} nodes")
    return X


def orient(ax, ay, bx, by, cx, cy) -> int:
    """Exact orientation sign of (a, b, c): float filter, rational fallback."""
    detl = (bx - ax) * (cy - ay)
    detr = (by - ay) * (cx - ax)
    det = detl - detr
    if detl * detr > 0.0 and abs(det) <= _ORIENT_EPS * (abs(detl) + abs(detr)):
        d = (Fraction(bx) - Fraction(ax)) * (Fraction(cy) - Fraction(ay)) - (
            Fraction(by) - Fraction(ay)
        ) * (Fraction(cx) - Fraction(ax))
        return int(d > 0) - int(d < 0)
    return int(det > 0.0) - int(det < 0.0)


def _between_strict(px, py, qx, qy, rx, ry) -> bool:
    # r assumed collinear with pq
    if not (min(px, qx) <= rx <= max(px, qx) and min(py, qy) <= ry <= max(py, qy)):
        return False
    return not ((rx == px and ry == py) or (rx == qx and ry == qy))


def segments_properly_cross(a1, a2, b1, b2) -> bool:
    """Crossing predicate on four points, implementing the module policy."""
    ax, ay = a1
    bx, by = a2
    cx, cy = b1
    dx, dy = b2
    if (ax == bx and ay == by) or (cx == dx and cy == dy):
        return False
    if (ax, ay) in ((cx, cy), (dx, dy)) or (bx, by) in ((cx, cy), (dx, dy)):
        return False

    o1 = orient(ax, ay, bx, by, cx, cy)
    o2 = orient(ax, ay, bx, by, dx, dy)
    o3 = orient(cx, cy, dx, dy, ax, ay)
    o4 = orient(cx, cy, dx, dy, bx, by)

    if o1 == 0 and o2 == 0 and o3 == 0 and o4 == 0:
        if ax == bx:
            lo1, hi1 = sorted((ay, by))
            lo2, hi2 = sorted((cy, dy))
        else:
            lo1, hi1 = sorted((ax, bx))
            lo2, hi2 = sorted((cx, dx))
        return max(lo1, lo2) < min(hi1, hi2)

    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _between_strict(ax, ay, bx, by, cx, cy):
        return True
    if o2 == 0 and _between_strict(ax, ay, bx, by, dx, dy):
        return True
    if o3 == 0 and _between_strict(cx, cy, dx, dy, ax, ay):
        return True
    if o4 == 0 and _between_strict(cx, cy, dx, dy, bx, by):
        return True
    return False


def _seg_cross_by_index(segs: np.ndarray, i: int, j: int) -> bool:
    return segments_properly_cross(
        (segs[i, 0], segs[i, 1]),
        (segs[i, 2], segs[i, 3]),
        (segs[j, 0], segs[j, 1]),
        (segs[j, 2], segs[j, 3]),
    )


def segments_cross_mask(segs_a: np.ndarray, segs_b: np.ndarray) -> np.ndarray:
    """Vectorized predicate over N segment pairs ((N,4) arrays), filtered
    entries resolved exactly. Returns a bool array."""
    raw = kernels.cross_mask(segs_a, segs_b)
    out = raw == 1
    for k in np.nonzero(raw == 2)[0]:
        out[k] = segments_properly_cross(
            segs_a[k, 0:2], segs_a[k, 2:4], segs_b[k, 0:2], segs_b[k, 2:4]
        )
    return out


@dataclass(frozen=True)
class CrossingList:
    """Properly crossing non-adjacent edge pairs, each unordered pair once."""

    pairs: tuple  # of ((i, j), (k, l)) node-index edge pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def angles(self, layout: np.ndarray) -> list[float]:
        return [crossing_angle(e1, e2, layout) for e1, e2 in self.pairs]


def edge_segments(layout: np.ndarray, g: Graph) -> np.ndarray:
    """(m, 4) float array [x1, y1, x2, y2] per edge."""
    e = g.edge_array()
    if len(e) == 0:
        return np.empty((0, 4), dtype=np.float64)
    return np.hstack([layout[e[:, 0]], layout[e[:, 1]]])


def _pairs_to_crossing_list(pairs, edges) -> CrossingList:
    out = []
    for i, j in pairs:
        a, b = tuple(edges[i]), tuple(edges[j])
        out.append((a, b) if a <= b else (b, a))
    return CrossingList(tuple(sorted(out)))


def brute_force_crossings(layout: np.ndarray, g: Graph) -> CrossingList:
    """O(m^2) pairwise enumeration; the oracle side of the dual route."""
    layout = check_layout(layout, g.n)
    segs = edge_segments(layout, g)
    enodes = g.edge_array()
    certain, uncertain = kernels.pairs_cross_bruteforce(segs, enodes)
    pairs = [tuple(p) for p in certain]
    for i, j in uncertain:
        if _seg_cross_by_index(segs, i, j):
            pairs.append((int(i), int(j)))
    return _pairs_to_crossing_list(sorted(pairs), g.edges)


# ---------------------------------------------------------------------------
# Bentley-Ottmann sweep (left to right, exact event ordering)
# ---------------------------------------------------------------------------


class _SweepSegment:
    __slots__ = ("idx", "p1", "p2", "slope", "fx1", "fy1", "fx2", "fy2", "fslope", "nodes")

    def __init__(self, idx, x1, y1, x2, y2, nodes):
        # stored left-to-right; exact rational endpoints plus float mirrors
        # for the filtered comparisons
        if (x1, y1) > (x2, y2):
            x1, y1, x2, y2 = x2, y2, x1, y1
        self.idx = idx
        self.p1 = (Fraction(x1), Fraction(y1))
        self.p2 = (Fraction(x2), Fraction(y2))
        self.slope = (self.p2[1] - self.p1[1]) / (self.p2[0] - self.p1[0])
        self.fx1, self.fy1 = float(x1), float(y1)
        self.fx2, self.fy2 = float(x2), float(y2)
        self.fslope = (self.fy2 - self.fy1) / (self.fx2 - self.fx1)
        self.nodes = nodes

    def y_at(self, x: Fraction) -> Fraction:
        return self.p1[1] + (x - self.p1[0]) * self.slope

    def cmp_y_at(self, xf: float, yf: float, x: Fraction, y: Fraction) -> int:
        """Sign of (y_at(x) - y): float filter with exact fallback. The
        bound includes the slope-amplified rounding of x itself, which
        dominates for near-vertical segments."""
        ya = self.fy1 + (xf - self.fx1) * self.fslope
        err = 1e-13 * (
            abs(self.fy1) + abs((xf - self.fx1) * self.fslope) + abs(yf) + 1.0
        ) + 1e-15 * abs(self.fslope) * (abs(xf) + abs(self.fx1))
        if ya > yf + err:
            return 1
        if ya < yf - err:
            return -1
        exact = self.y_at(x)
        return int(exact > y) - int(exact < y)

    def cmp_slope(self, other: "_SweepSegment") -> int:
        d = self.fslope - other.fslope
        tol = 1e-13 * (abs(self.fslope) + abs(other.fslope) + 1.0)
        if d > tol:
            return 1
        if d < -tol:
            return -1
        return int(self.slope > other.slope) - int(self.slope < other.slope)


def _proper_interior_crossing(s: _SweepSegment, t: _SweepSegment):
    """Intersection point if the two segments cross strictly in both
    interiors (the only case that swaps sweep order), else None. The
    straddle test runs on exact orientation signs of the float endpoints;
    the rational intersection point is only computed for true crossings."""
    o1 = orient(s.fx1, s.fy1, s.fx2, s.fy2, t.fx1, t.fy1)
    o2 = orient(s.fx1, s.fy1, s.fx2, s.fy2, t.fx2, t.fy2)
    if o1 * o2 >= 0:
        return None
    o3 = orient(t.fx1, t.fy1, t.fx2, t.fy2, s.fx1, s.fy1)
    o4 = orient(t.fx1, t.fy1, t.fx2, t.fy2, s.fx2, s.fy2)
    if o3 * o4 >= 0:
        return None
    a1, a2, b1, b2 = s.p1, s.p2, t.p1, t.p2
    d1 = (a2[0] - a1[0], a2[1] - a1[1])
    d2 = (b2[0] - b1[0], b2[1] - b1[1])
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    r = (b1[0] - a1[0], b1[1] - a1[1])
    t_par = (r[0] * d2[1] - r[1] * d2[0]) / denom
    return (a1[0] + t_par * d1[0], a1[1] + t_par * d1[1])


class _Status:
    """Sweep status: active segments ordered by (y at sweep x, slope, idx)."""

    def __init__(self):
        self.items: list[_SweepSegment] = []

    def block_bounds(self, x: Fraction, y: Fraction):
        """Index range [lo, hi) of segments whose y at x equals y."""
        items = self.items
        xf, yf = float(x), float(y)
        lo, hi = 0, len(items)
        while lo < hi:
            mid = (lo + hi) // 2
            if items[mid].cmp_y_at(xf, yf, x, y) < 0:
                lo = mid + 1
            else:
                hi = mid
        start = lo
        lo, hi = start, len(items)
        while lo < hi:
            mid = (lo + hi) // 2
            if items[mid].cmp_y_at(xf, yf, x, y) <= 0:
                lo = mid + 1
            else:
                hi = mid
        return start, lo


def all_crossings(layout: np.ndarray, g: Graph) -> CrossingList:
    """Exact set of properly crossing non-adjacent edge pairs via an
    output-sensitive sweep. Vertical segments are resolved in a direct
    pre-pass; everything else goes through the event sweep."""
    layout = check_layout(layout, g.n)
    edges = g.edge_array()
    m = len(edges)
    if m < 2:
        return CrossingList(())
    segs = edge_segments(layout, g)

    def adjacent(i, j):
        a, b = edges[i], edges[j]
        return a[0] in (b[0], b[1]) or a[1] in (b[0], b[1])

    found: set[tuple[int, int]] = set()

    vertical = [i for i in range(m) if segs[i, 0] == segs[i, 2]]
    vertical_set = set(vertical)
    zero_len = {
        i for i in range(m) if segs[i, 0] == segs[i, 2] and segs[i, 1] == segs[i, 3]
    }
    for v in vertical:
        if v in zero_len:
            continue
        for j in range(m):
            if j == v or (j in vertical_set and j <= v) or j in zero_len:
                continue
            if adjacent(v, j):
                continue
            if _seg_cross_by_index(segs, v, j):
                found.add((min(v, j), max(v, j)))

    sweep_ids = [i for i in range(m) if i not in vertical_set and i not in zero_len]
    if len(sweep_ids) >= 2:
        _sweep(segs, edges, sweep_ids, adjacent, found)

    return _pairs_to_crossing_list(sorted(found), g.edges)


def _sweep(segs, edges, sweep_ids, adjacent, found):
    ssegs = {
        i: _SweepSegment(i, segs[i, 0], segs[i, 1], segs[i, 2], segs[i, 3], edges[i])
        for i in sweep_ids
    }
    starts: dict[tuple, list] = {}
    heap = []
    queued = set()

    def push(point):
        if point not in queued:
            queued.add(point)
            heapq.heappush(heap, point)

    for s in ssegs.values():
        starts.setdefault(s.p1, []).append(s)
        push(s.p1)
        push(s.p2)

    status = _Status()

    def report(group):
        for a in range(len(group)):
            for b in range(a + 1, len(group)):
                s, t = group[a], group[b]
                i, j = min(s.idx, t.idx), max(s.idx, t.idx)
                if (i, j) in found or adjacent(i, j):
                    continue
                if _seg_cross_by_index(segs, i, j):
                    found.add((i, j))

    def schedule(s, t, after):
        z = _proper_interior_crossing(s, t)
        if z is not None and z > after:
            push(z)

    while heap:
        p = heapq.heappop(heap)
        px, py = p
        entering = starts.pop(p, [])
        lo, hi = status.block_bounds(px, py)
        block = status.items[lo:hi]

        report(entering + block)

        passing = [s for s in block if s.p2 != p] + entering
        # order just right of p: by slope, ties by index
        passing.sort(
            key=functools.cmp_to_key(
                lambda a, b: a.cmp_slope(b) or (a.idx > b.idx) - (a.idx < b.idx)
            )
        )
        status.items[lo:hi] = passing

        if passing:
            if lo > 0:
                schedule(status.items[lo - 1], status.items[lo], p)
            top = lo + len(passing)
            if top < len(status.items):
                schedule(status.items[top - 1], status.items[top], p)
        elif 0 < lo < len(status.items):
            schedule(status.items[lo - 1], status.items[lo], p)


# ---------------------------------------------------------------------------
# Angles and box measures
# ---------------------------------------------------------------------------


def crossing_angle(e1, e2, layout: np.ndarray) -> float:
    """Acute angle between the supporting lines of two crossing edges."""
    v1 = layout[e1[0]] - layout[e1[1]]
    v2 = layout[e2[0]] - layout[e2[1]]
    n1 = math.hypot(*v1)
    n2 = math.hypot(*v2)
    if n1 < 1e-300 or n2 < 1e-300:
        raise ValueError("crossing_angle: zero-length edge")
    c = abs(float(np.dot(v1, v2))) / (n1 * n2)
    return math.acos(min(1.0, c))


def incident_angle(i: int, j: int, k: int, layout: np.ndarray) -> float:
    """Angle at vertex j between rays j->i and j->k, in [0, pi]."""
    a = layout[i] - layout[j]
    b = layout[k] - layout[j]
    if math.hypot(*a) < 1e-300 or math.hypot(*b) < 1e-300:
        raise ValueError("incident_angle: coincident points")
    z = abs(a[0] * b[1] - a[1] * b[0])
    d = float(np.dot(a, b))
    return math.atan2(z, d)


def singular_values_2col(X: np.ndarray) -> tuple[float, float]:
    """Singular values of the centered coordinate matrix, closed form from
    the 2x2 Gram matrix."""
    Y = np.asarray(X, dtype=np.float64)
    Y = Y - Y.mean(axis=0)
    g11 = float(np.dot(Y[:, 0], Y[:, 0]))
    g22 = float(np.dot(Y[:, 1], Y[:, 1]))
    g12 = float(np.dot(Y[:, 0], Y[:, 1]))
    tr = g11 + g22
    disc = math.sqrt(max(0.0, (g11 - g22) ** 2 + 4.0 * g12 * g12))
    lam1 = max(0.0, 0.5 * (tr + disc))
    lam2 = max(0.0, 0.5 * (tr - disc))
    return math.sqrt(lam1), math.sqrt(lam2)


def rotated_bbox(X: np.ndarray, theta: float) -> tuple[float, float]:
    """Axis-aligned bounding-box extents after rotating about the centroid."""
    Y = np.asarray(X, dtype=np.float64)
    if Y.shape[0] < 2:
        raise ValueError("rotated_bbox needs at least 2 points")
    Y = Y - Y.mean(axis=0)
    c, s = math.cos(theta), math.sin(theta)
    rx = Y[:, 0] * c - Y[:, 1] * s
    ry = Y[:, 0] * s + Y[:, 1] * c
    return float(rx.max() - rx.min()), float(ry.max() - ry.min())
