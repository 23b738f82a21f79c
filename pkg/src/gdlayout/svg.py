"""Deterministic SVG rendering: one line per edge, one circle per node."""

from __future__ import annotations

import numpy as np

from .graphs import Graph


def render_svg(
    g: Graph,
    layout: np.ndarray,
    width: int = 640,
    node_radius: float = 0.012,
    stroke: str = "#1f3b73",
    fill: str = "#d1495b",
) -> str:
    """Fixed inputs give byte-identical output; the viewBox fits the drawing
    with a 5% margin. node_radius is a fraction of the larger extent."""
    X = np.asarray(layout, dtype=np.float64)
    lo = X.min(axis=0)
    hi = X.max(axis=0)
    span = hi - lo
    extent = float(max(span[0], span[1]))
    if extent <= 0.0:
        extent = 1.0
    margin = 0.05 * extent
    vb = tuple(
        float(v)
        for v in (lo[0] - margin, lo[1] - margin, span[0] + 2 * margin, span[1] + 2 * margin)
    )
    height = int(round(width * vb[3] / vb[2])) if vb[2] > 0 else width
    r = node_radius * extent
    sw = 0.35 * r

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{vb[0]!r} {vb[1]!r} {vb[2]!r} {vb[3]!r}">'
    ]
    parts.append(f'<g stroke="{stroke}" stroke-width="{sw!r}" stroke-linecap="round">')
    for i, j in g.edges:
        x1, y1 = float(X[i, 0]), float(X[i, 1])
        x2, y2 = float(X[j, 0]), float(X[j, 1])
        parts.append(f'<line x1="{x1!r}" y1="{y1!r}" x2="{x2!r}" y2="{y2!r}"/>')
    parts.append("</g>")
    parts.append(f'<g fill="{fill}">')
    for i in range(g.n):
        cx, cy = float(X[i, 0]), float(X[i, 1])
        parts.append(f'<circle cx="{cx!r}" cy="{cy!r}" r="{r!r}"/>')
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
