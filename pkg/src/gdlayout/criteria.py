"""The nine readability criteria: sampled losses with exact gradients, and
full-layout quality measures.

Loss functions return LossValue(value, gradient) where gradient is a sparse
map node index -> d(value)/d(X_i) as a length-2 array. Every gradient is
hand-derived and checked against central finite differences in the test
suite. Sample formats:

* stress: (I, J, D) index/distance arrays (or an iterable of (i, j, d)),
* ideal edge length: (I, J, L) with target lengths L,
* neighborhood: a SubgraphSample (induced subgraph of >= 3 nodes),
* crossing angle: iterable of ((i, j), (k, l)) properly crossing edge pairs,
* aspect ratio: node index array,
* angular resolution: (I, J, K) triples for incident edges (i,j),(j,k),
* vertex resolution: (I, J) node pairs plus the frozen layout diameter,
* gabriel: (I, J, K) triples for edge (i,j) and off-edge node k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _slow, kernels
from .geometry import all_crossings, incident_angle, rotated_bbox
from .graphs import DistanceMatrix, Graph
from .lovasz import lovasz_hinge

KINDS = ("ST", "IL", "NP", "CR", "CAM", "AR", "ANR", "VR", "GB")

# qualities exported as 1 - Q so that every table column reads lower-is-better
INVERTED_ON_EXPORT = ("NP", "AR", "ANR", "VR", "GB")

DEFAULT_SAMPLE_SIZES = {
    "ST": 32,
    "IL": 32,
    "NP": 16,
    "CR": 128,
    "CAM": 16,
    "AR": 128,
    "ANR": 128,
    "VR": 256,
    "GB": 64,
}

CE_CLAMP = 1e-9


def cross_entropy(y: float, t: float) -> float:
    """CE(y, t) with y clamped into [CE_CLAMP, 1-CE_CLAMP]."""
    yc = min(max(y, CE_CLAMP), 1.0 - CE_CLAMP)
    return -t * math.log(yc) - (1.0 - t) * math.log(1.0 - yc)


@dataclass
class LossValue:
    value: float
    gradient: dict[int, np.ndarray]
    skipped: int = 0  # degenerate sample elements dropped (CAM zero-length edges)


@dataclass
class CriterionConfig:
    kind: str
    sample_size: int = 0  # 0 -> DEFAULT_SAMPLE_SIZES[kind]
    weight_schedule: object = 1.0  # Schedule or constant
    ideal_length: float = 1.0  # IL
    angular_sensitivity: float = 1.0  # ANR
    target_ratio: float = 1.0  # AR
    target_resolution: float | None = None  # VR; None -> 1/sqrt(n)
    rotations: int = 7  # AR quality
    extra_fraction: float = 0.1  # NP subgraph outsiders

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown criterion kind {self.kind!r}")
        if self.sample_size == 0:
            self.sample_size = DEFAULT_SAMPLE_SIZES[self.kind]
        if self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")
        for name in ("ideal_length", "angular_sensitivity", "target_ratio"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.target_resolution is not None and self.target_resolution <= 0:
            raise ValueError("target_resolution must be positive")


def _grad_dict(idx: np.ndarray, dense: np.ndarray) -> dict[int, np.ndarray]:
    support = np.unique(idx)
    return {int(i): dense[i].copy() for i in support}


def _unit_vectors(diff: np.ndarray, dist: np.ndarray, I, J) -> np.ndarray:
    """Rows diff/dist with the deterministic fallback direction for
    coincident points."""
    tiny = dist < 1e-12
    safe = np.where(tiny, 1.0, dist)
    u = diff / safe[:, None]
    if np.any(tiny):
        ux, uy = _slow._fallback_direction(np.asarray(I)[tiny], np.asarray(J)[tiny])
        u[tiny, 0] = ux
        u[tiny, 1] = uy
    return u


def _as_pair_arrays(sample):
    if isinstance(sample, tuple) and len(sample) == 3:
        I, J, D = sample
    else:
        rows = list(sample)
        I = [r[0] for r in rows]
        J = [r[1] for r in rows]
        D = [r[2] for r in rows]
    return (
        np.asarray(I, dtype=np.int64),
        np.asarray(J, dtype=np.int64),
        np.asarray(D, dtype=np.float64),
    )


# ---------------------------------------------------------------------------
# Stress (ST)
# ---------------------------------------------------------------------------


def stress_loss(layout: np.ndarray, pairs) -> LossValue:
    """Mean of d^-2 (||X_i - X_j|| - d)^2 over the sampled pairs."""
    I, J, D = _as_pair_arrays(pairs)
    if np.any(D < 1) or np.any(I == J):
        raise ValueError("stress pairs need i != j and d >= 1")
    dense = np.zeros_like(layout)
    value = kernels.stress_batch(layout, I, J, D, dense, 1.0)
    return LossValue(value, _grad_dict(np.concatenate([I, J]), dense))


def stress_quality(layout: np.ndarray, dist: DistanceMatrix) -> float:
    """The stress loss over all n(n-1)/2 pairs."""
    n = dist.n
    if n < 2:
        return 0.0
    total = 0.0
    for i in range(n - 1):
        d = dist.row(i)[i + 1 :].astype(np.float64)
        diff = layout[i] - layout[i + 1 :]
        e = np.hypot(diff[:, 0], diff[:, 1])
        total += float(np.sum(((e - d) / d) ** 2))
    return total / (n * (n - 1) / 2)


# ---------------------------------------------------------------------------
# Ideal edge length (IL)
# ---------------------------------------------------------------------------


def ideal_edge_length_loss(layout: np.ndarray, edges_sample) -> LossValue:
    """Mean of ((||X_i - X_j|| - l) / l)^2 over sampled edges."""
    I, J, L = _as_pair_arrays(edges_sample)
    if np.any(L <= 0):
        raise ValueError("ideal lengths must be positive")
    dense = np.zeros_like(layout)
    value = kernels.edge_len_batch(layout, I, J, L, dense, 1.0)
    return LossValue(value, _grad_dict(np.concatenate([I, J]), dense))


def ideal_edge_length_quality(g: Graph, layout: np.ndarray, ideal: float = 1.0) -> float:
    e = g.edge_array()
    if len(e) == 0:
        return 0.0
    diff = layout[e[:, 0]] - layout[e[:, 1]]
    d = np.hypot(diff[:, 0], diff[:, 1])
    return float(np.mean(((d - ideal) / ideal) ** 2))


# ---------------------------------------------------------------------------
# Neighborhood preservation (NP)
# ---------------------------------------------------------------------------


@dataclass
class SubgraphSample:
    """Induced subgraph for the neighborhood loss: global node ids, boolean
    adjacency of the induced subgraph, and the induced degrees."""

    nodes: np.ndarray
    adj: np.ndarray
    degrees: np.ndarray = field(init=False)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=np.int64)
        self.adj = np.asarray(self.adj, dtype=bool)
        self.degrees = self.adj.sum(axis=1).astype(np.int64)


def subgraph_sample_from_nodes(g: Graph, nodes) -> SubgraphSample:
    nodes = np.asarray(sorted(set(int(v) for v in nodes)), dtype=np.int64)
    pos = {int(v): a for a, v in enumerate(nodes)}
    adj = np.zeros((len(nodes), len(nodes)), dtype=bool)
    for v in nodes:
        for w in g.adjacency[v]:
            if int(w) in pos:
                adj[pos[int(v)], pos[int(w)]] = True
    return SubgraphSample(nodes, adj)


def _khat_row(dists: np.ndarray, i: int, k: int):
    """K-hat entries for row i given the full distance row (self included).

    Returns (values over j != i in ascending-j order, threshold info):
    threshold info is (pi_k, pi_k1, coef) with global row indices and the
    coefficient applied to d(i, pi_k); pi_k1 is None in the fallback case
    where i is within k of every other sample node.
    """
    p = len(dists)
    others = np.concatenate([np.arange(i), np.arange(i + 1, p)])
    d_others = dists[others]
    order = np.lexsort((others, d_others))
    ranked = others[order]
    if k <= p - 2:
        pi_k, pi_k1 = int(ranked[k - 1]), int(ranked[k])
        threshold = 0.5 * (dists[pi_k] + dists[pi_k1])
        info = (pi_k, pi_k1, 0.5)
    else:  # k == p-1: no (k+1)-th neighbour; phantom at twice the k-th distance
        pi_k = int(ranked[k - 1])
        threshold = 1.5 * dists[pi_k]
        info = (pi_k, None, 1.5)
    values = -(d_others - threshold)
    return others, values, info


def neighborhood_khat(layout: np.ndarray, sample_nodes, i: int, k: int) -> np.ndarray:
    """Row of the k-nearest-neighbour estimator for sample node i (local
    index), zeros on the diagonal; positive exactly for the k Euclidean
    nearest sample nodes (ties at the threshold give zeros)."""
    nodes = np.asarray(sample_nodes, dtype=np.int64)
    p = len(nodes)
    if p < k + 2:
        raise ValueError("need at least k+2 nodes in the sample")
    P = layout[nodes]
    diff = P - P[i]
    dists = np.hypot(diff[:, 0], diff[:, 1])
    others, values, _ = _khat_row(dists, i, k)
    row = np.zeros(p)
    row[others] = values
    return row


def neighborhood_loss(layout: np.ndarray, sample: SubgraphSample) -> LossValue:
    """Lovász hinge of the rescaled K-hat rows against induced adjacency,
    with k per node equal to its induced degree. Isolated sample nodes are
    skipped; a row whose entries are all zero (exact threshold ties) is
    skipped as well."""
    nodes = sample.nodes
    p = len(nodes)
    if p < 3:
        raise ValueError("neighborhood sample needs >= 3 nodes")
    P = layout[nodes]
    dx = P[:, 0][:, None] - P[:, 0][None, :]
    dy = P[:, 1][:, None] - P[:, 1][None, :]
    dmat = np.hypot(dx, dy)

    scores, labels = [], []
    row_meta = []  # (i, others, mu, khat, info)
    for i in range(p):
        k = int(sample.degrees[i])
        if k == 0:
            continue
        others, khat, info = _khat_row(dmat[i], i, k)
        mu = float(np.mean(np.abs(khat)))
        if mu < 1e-30:
            continue
        scores.append(khat / mu)
        labels.append(sample.adj[i, others].astype(np.float64))
        row_meta.append((i, others, mu, khat, info))
    if not row_meta:
        raise ValueError("neighborhood sample has no usable rows")

    F = np.concatenate(scores)
    y = np.concatenate(labels)
    value, gF = lovasz_hinge(F, y)

    # back-propagate through rescaling, thresholds and distances
    gdist = np.zeros((p, p))
    cursor = 0
    for i, others, mu, khat, info in row_meta:
        q = len(others)
        gf = gF[cursor : cursor + q]
        cursor += q
        dot = float(np.dot(gf, khat))
        gk = gf / mu - (dot / (q * mu * mu)) * np.sign(khat)
        # khat_j = -(d_ij - threshold)
        gdist[i, others] += -gk
        pi_k, pi_k1, coef = info
        gsum = float(np.sum(gk))
        gdist[i, pi_k] += coef * gsum
        if pi_k1 is not None:
            gdist[i, pi_k1] += coef * gsum

    W = gdist + gdist.T  # d_ij == d_ji
    gP = np.zeros_like(P)
    gids = nodes
    for i in range(p):
        w = W[i]
        mask = w != 0.0
        mask[i] = False
        if not np.any(mask):
            continue
        idx = np.nonzero(mask)[0]
        diff = P[i] - P[idx]
        d = dmat[i, idx]
        u = _unit_vectors(diff, d, np.full(len(idx), gids[i]), gids[idx])
        gP[i] += (w[idx][:, None] * u).sum(axis=0)

    dense = np.zeros_like(layout)
    dense[nodes] = gP
    return LossValue(value, _grad_dict(nodes, dense))


def neighborhood_quality(layout: np.ndarray, g: Graph) -> float:
    """Exact Jaccard index of the k-NN indicator (k = degree, ties broken by
    node index) against the adjacency matrix, over ordered pairs."""
    n = g.n
    if n < 2:
        return 1.0
    inter = 0
    union = 0
    order_ids = np.arange(n)
    for i in range(n):
        k = g.degree(i)
        diff = layout - layout[i]
        d = np.hypot(diff[:, 0], diff[:, 1])
        d[i] = np.inf
        ranked = np.lexsort((order_ids, d))
        nearest = set(int(v) for v in ranked[:k])
        neigh = set(g.adjacency[i])
        inter += len(nearest & neigh)
        union += len(nearest | neigh)
    if union == 0:
        return 1.0
    return inter / union


# ---------------------------------------------------------------------------
# Crossing angle maximization (CAM)
# ---------------------------------------------------------------------------


def crossing_angle_loss(layout: np.ndarray, crossing_sample) -> LossValue:
    """Sum of squared cosines of the sampled crossing pairs' angles.
    Pairs with a zero-length edge are skipped and counted in .skipped."""
    pairs = list(crossing_sample)
    value = 0.0
    dense = np.zeros_like(layout)
    touched = []
    skipped = 0
    for (i, j), (k, l) in pairs:
        a = layout[i] - layout[j]
        b = layout[k] - layout[l]
        na2 = float(a @ a)
        nb2 = float(b @ b)
        if na2 < 1e-24 or nb2 < 1e-24:
            skipped += 1
            continue
        na, nb = math.sqrt(na2), math.sqrt(nb2)
        dot = float(a @ b)
        c = dot / (na * nb)
        value += c * c
        # d(c^2)/da = 2c * (b/(|a||b|) - c*a/|a|^2)
        ga = 2.0 * c * (b / (na * nb) - c * a / na2)
        gb = 2.0 * c * (a / (na * nb) - c * b / nb2)
        dense[i] += ga
        dense[j] -= ga
        dense[k] += gb
        dense[l] -= gb
        touched.extend((i, j, k, l))
    return LossValue(value, _grad_dict(np.asarray(touched, dtype=np.int64), dense), skipped)


def crossing_angle_quality(layout: np.ndarray, g: Graph) -> float:
    """Worst normalized deviation of crossing angles from 90 degrees; 0 when
    the drawing has no crossings."""
    crossings = all_crossings(layout, g)
    if len(crossings) == 0:
        return 0.0
    worst = 0.0
    for theta in crossings.angles(layout):
        worst = max(worst, abs(theta - math.pi / 2) / (math.pi / 2))
    return worst


# ---------------------------------------------------------------------------
# Aspect ratio (AR)
# ---------------------------------------------------------------------------


def aspect_ratio_loss(layout: np.ndarray, node_sample, target: float = 1.0) -> LossValue:
    """Cross entropy between sigma2/sigma1 of the centered sample and the
    target ratio."""
    idx = np.asarray(node_sample, dtype=np.int64)
    P = layout[idx]
    p = len(idx)
    Y = P - P.mean(axis=0)
    g11 = float(Y[:, 0] @ Y[:, 0])
    g22 = float(Y[:, 1] @ Y[:, 1])
    g12 = float(Y[:, 0] @ Y[:, 1])
    tr = g11 + g22
    disc_sq = (g11 - g22) ** 2 + 4.0 * g12 * g12
    disc = math.sqrt(max(0.0, disc_sq))
    lam1 = max(0.0, 0.5 * (tr + disc))
    lam2 = max(0.0, 0.5 * (tr - disc))
    s1 = math.sqrt(lam1)
    s2 = math.sqrt(lam2)

    if s1 < 1e-12:
        # all points coincident: ratio defined as 1, flat gradient
        return LossValue(cross_entropy(1.0, target), {int(i): np.zeros(2) for i in np.unique(idx)})

    s1g = s1 + 1e-9
    ratio = s2 / s1
    value = cross_entropy(ratio, target)

    if CE_CLAMP < ratio < 1.0 - CE_CLAMP:
        dce = -target / ratio + (1.0 - target) / (1.0 - ratio)
    else:
        dce = 0.0

    dr_ds1 = -s2 / (s1g * s1g)
    dr_ds2 = 1.0 / s1g
    ds1_dl1 = 0.5 / s1g
    ds2_dl2 = 0.5 / max(s2, 1e-9)
    if disc > 1e-18:
        dd11 = (g11 - g22) / disc
        dd12 = 4.0 * g12 / disc
    else:
        dd11 = dd12 = 0.0
    # lam1 = (tr + disc)/2, lam2 = (tr - disc)/2
    dl1 = np.array([0.5 * (1 + dd11), 0.5 * (1 - dd11), 0.5 * dd12])
    dl2 = np.array([0.5 * (1 - dd11), 0.5 * (1 + dd11), -0.5 * dd12])
    dgram = dce * (dr_ds1 * ds1_dl1 * dl1 + dr_ds2 * ds2_dl2 * dl2)

    gY = np.zeros_like(Y)
    gY[:, 0] = dgram[0] * 2.0 * Y[:, 0] + dgram[2] * Y[:, 1]
    gY[:, 1] = dgram[1] * 2.0 * Y[:, 1] + dgram[2] * Y[:, 0]
    gP = gY - gY.mean(axis=0)

    dense = np.zeros_like(layout)
    np.add.at(dense, idx, gP)
    return LossValue(value, _grad_dict(idx, dense))


def aspect_ratio_quality(layout: np.ndarray, rotations: int = 7) -> float:
    """Min over sampled rotations of min(w, h)/max(w, h)."""
    best = 1.0
    for k in range(rotations):
        w, h = rotated_bbox(layout, 2.0 * math.pi * k / rotations)
        hi = max(w, h)
        if hi <= 0.0:
            continue  # degenerate point cloud counts as square
        best = min(best, min(w, h) / hi)
    return best


# ---------------------------------------------------------------------------
# Angular resolution (ANR)
# ---------------------------------------------------------------------------


def angular_resolution_loss(layout: np.ndarray, triples, sensitivity: float = 1.0) -> LossValue:
    """Sum of exp(-s * angle) over sampled incident edge pairs (i,j),(j,k)."""
    value = 0.0
    dense = np.zeros_like(layout)
    touched = []
    for i, j, k in triples:
        a = layout[i] - layout[j]
        b = layout[k] - layout[j]
        na = math.hypot(*a)
        nb = math.hypot(*b)
        if na < 1e-12 or nb < 1e-12:
            raise ValueError("angular resolution: coincident points")
        cross = a[0] * b[1] - a[1] * b[0]
        z = abs(cross)
        d = float(a @ b)
        phi = math.atan2(z, d)
        term = math.exp(-sensitivity * phi)
        value += term
        denom = z * z + d * d
        sgn = 1.0 if cross >= 0 else -1.0
        # dphi/da = (d * sgn * (b_y, -b_x) - z * b)/denom, same pattern for b
        dphi_da = (d * sgn * np.array([b[1], -b[0]]) - z * b) / denom
        dphi_db = (d * (-sgn) * np.array([a[1], -a[0]]) - z * a) / denom
        coef = -sensitivity * term
        dense[i] += coef * dphi_da
        dense[k] += coef * dphi_db
        dense[j] -= coef * (dphi_da + dphi_db)
        touched.extend((i, j, k))
    return LossValue(value, _grad_dict(np.asarray(touched, dtype=np.int64), dense))


def incident_triples(g: Graph):
    """All (i, j, k) with edges (i,j),(j,k), each unordered pair once."""
    out = []
    for j in range(g.n):
        neigh = g.adjacency[j]
        for a in range(len(neigh)):
            for b in range(a + 1, len(neigh)):
                out.append((neigh[a], j, neigh[b]))
    return out


def angular_resolution_quality(layout: np.ndarray, g: Graph) -> float:
    """Minimum incident angle normalized by 2*pi/max_degree; 1 when the graph
    has no incident edge pairs."""
    triples = incident_triples(g)
    if not triples:
        return 1.0
    lo = min(incident_angle(i, j, k, layout) for i, j, k in triples)
    bound = 2.0 * math.pi / g.max_degree
    return min(1.0, lo / bound)


# ---------------------------------------------------------------------------
# Vertex resolution (VR)
# ---------------------------------------------------------------------------


def layout_diameter(layout: np.ndarray) -> float:
    """Max pairwise distance; convex hull + brute force on the hull."""
    n = len(layout)
    if n < 2:
        return 0.0
    pts = layout
    if n > 64:
        try:
            from scipy.spatial import ConvexHull

            hull = ConvexHull(pts)
            pts = layout[hull.vertices]
        except Exception:
            pass  # degenerate (collinear) inputs: fall through to brute force
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff**2).sum(-1)).max())


def vertex_resolution_loss(
    layout: np.ndarray, pair_sample, diameter: float, target: float
) -> LossValue:
    """Sum of squared hinge shortfalls below target*diameter; the diameter is
    frozen (no gradient through it)."""
    if diameter <= 0.0:
        raise ValueError("vertex resolution: degenerate layout (zero diameter)")
    if isinstance(pair_sample, tuple):
        I, J = (np.asarray(a, dtype=np.int64) for a in pair_sample)
    else:
        rows = list(pair_sample)
        I = np.asarray([r[0] for r in rows], dtype=np.int64)
        J = np.asarray([r[1] for r in rows], dtype=np.int64)
    R = target * diameter
    diff = layout[I] - layout[J]
    dist = np.hypot(diff[:, 0], diff[:, 1])
    short = 1.0 - dist / R
    active = short > 0.0
    value = float(np.sum(short[active] ** 2))
    dense = np.zeros_like(layout)
    if np.any(active):
        u = _unit_vectors(diff[active], dist[active], I[active], J[active])
        coef = (-2.0 * short[active] / R)[:, None] * u
        np.add.at(dense, I[active], coef)
        np.add.at(dense, J[active], -coef)
    return LossValue(value, _grad_dict(np.concatenate([I, J]), dense))


def vertex_resolution_quality(layout: np.ndarray, target: float | None = None) -> float:
    n = len(layout)
    if n < 2:
        raise ValueError("vertex resolution quality needs n >= 2")
    if target is None:
        target = 1.0 / math.sqrt(n)
    diam = layout_diameter(layout)
    if diam <= 0.0:
        return 0.0  # all nodes coincident
    from scipy.spatial import cKDTree

    tree = cKDTree(layout)
    d, _ = tree.query(layout, k=2)
    lo = float(d[:, 1].min())
    return min(1.0, lo / (target * diam))


# ---------------------------------------------------------------------------
# Gabriel property (GB)
# ---------------------------------------------------------------------------


def gabriel_loss(layout: np.ndarray, triples) -> LossValue:
    """Sum over (edge (i,j), node k) of the squared intrusion of k into the
    disk with diameter (i, j)."""
    value = 0.0
    dense = np.zeros_like(layout)
    touched = []
    for i, j, k in triples:
        if k == i or k == j:
            raise ValueError("gabriel sample node lies on the edge")
        xi, xj, xk = layout[i], layout[j], layout[k]
        cvec = 0.5 * (xi + xj)
        evec = xi - xj
        elen = math.hypot(*evec)
        radius = 0.5 * elen
        dvec = xk - cvec
        dist = math.hypot(*dvec)
        depth = radius - dist
        if depth <= 0.0:
            touched.extend((i, j, k))
            continue
        value += depth * depth
        if elen < 1e-12:
            ue = np.array(_slow._fallback_direction(int(i), int(j)))
        else:
            ue = evec / elen
        if dist < 1e-12:
            ud = np.array(_slow._fallback_direction(int(k), int(i)))
        else:
            ud = dvec / dist
        # d(depth)/dXi = 0.5*ue - (-0.5*ud) ... via radius and centre terms
        gi = 2.0 * depth * (0.5 * ue + 0.5 * ud)
        gj = 2.0 * depth * (-0.5 * ue + 0.5 * ud)
        gk = 2.0 * depth * (-ud)
        dense[i] += gi
        dense[j] += gj
        dense[k] += gk
        touched.extend((i, j, k))
    return LossValue(value, _grad_dict(np.asarray(touched, dtype=np.int64), dense))


def gabriel_quality(layout: np.ndarray, g: Graph) -> float:
    """min(1, min over edges and off-edge nodes of dist-to-centre / radius);
    1 when no (edge, off-edge node) combination exists."""
    if g.num_edges == 0 or g.n < 3:
        return 1.0
    best = 1.0
    nodes = np.arange(g.n)
    for i, j in g.edges:
        c = 0.5 * (layout[i] + layout[j])
        r = 0.5 * math.hypot(*(layout[i] - layout[j]))
        mask = (nodes != i) & (nodes != j)
        d = np.hypot(layout[mask, 0] - c[0], layout[mask, 1] - c[1])
        if r < 1e-300:
            if np.any(d <= 0.0):
                return 0.0
            continue
        best = min(best, float(d.min()) / r)
        if best == 0.0:
            return 0.0
    return min(1.0, best)
