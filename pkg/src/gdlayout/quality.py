"""Nine-way quality evaluation and comparison tables.

Internal quality values follow the criteria module's definitions. Exports
(CSV rows, tables) invert NP, AR, ANR, VR and GB to 1 - Q so that every
column reads lower-is-better; ST, IL, CR and CAM are already that way.
CSV schema: method,graph,ST,IL,NP,CR,CAM,AR,ANR,VR,GB.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from . import criteria as C
from .criteria import INVERTED_ON_EXPORT, KINDS
from .graphs import DistanceMatrix, Graph
from .neural import crossing_count_quality

CSV_HEADER = "method,graph," + ",".join(KINDS)


@dataclass(frozen=True)
class QualityReport:
    stress: float
    ideal_edge_length: float
    neighborhood: float
    crossings: int
    crossing_angle: float
    aspect_ratio: float
    angular_resolution: float
    vertex_resolution: float
    gabriel: float

    def as_dict(self) -> dict:
        return {
            "ST": self.stress,
            "IL": self.ideal_edge_length,
            "NP": self.neighborhood,
            "CR": self.crossings,
            "CAM": self.crossing_angle,
            "AR": self.aspect_ratio,
            "ANR": self.angular_resolution,
            "VR": self.vertex_resolution,
            "GB": self.gabriel,
        }

    def exported(self) -> dict:
        """Values in the tables' lower-is-better convention."""
        out = self.as_dict()
        for k in INVERTED_ON_EXPORT:
            out[k] = 1.0 - out[k]
        return out


def evaluate_all(g: Graph, layout: np.ndarray, dist: DistanceMatrix | None = None) -> QualityReport:
    """All nine measures on one (graph, layout) pair; pure and deterministic."""
    if dist is None:
        dist = DistanceMatrix(g)
    return QualityReport(
        stress=C.stress_quality(layout, dist),
        ideal_edge_length=C.ideal_edge_length_quality(g, layout),
        neighborhood=C.neighborhood_quality(layout, g),
        crossings=crossing_count_quality(layout, g),
        crossing_angle=C.crossing_angle_quality(layout, g),
        aspect_ratio=C.aspect_ratio_quality(layout),
        angular_resolution=C.angular_resolution_quality(layout, g),
        vertex_resolution=C.vertex_resolution_quality(layout),
        gabriel=C.gabriel_quality(layout, g),
    )


def csv_row(method: str, graph: str, report: QualityReport) -> str:
    vals = report.exported()
    cells = [method, graph]
    for k in KINDS:
        v = vals[k]
        cells.append(str(int(v)) if k == "CR" else f"{float(v):.6f}")
    return ",".join(cells)


def report_table(entries: list[tuple[str, str, QualityReport]]):
    """(csv_text, aligned_text) for [(method, graph, report), ...] rows.

    The aligned table marks the best (lowest, exported convention) value per
    measure column with '*'.
    """
    if not entries:
        raise ValueError("report_table needs at least one entry")
    rows = []
    for method, graph, rep in entries:
        vals = rep.exported()
        rows.append((method, graph, [vals[k] for k in KINDS]))

    csv_buf = io.StringIO()
    csv_buf.write(CSV_HEADER + "\n")
    for method, graph, rep in entries:
        csv_buf.write(csv_row(method, graph, rep) + "\n")

    best = [min(r[2][c] for r in rows) for c in range(len(KINDS))]
    header = ["method", "graph", *KINDS]
    table_rows = [header]
    for method, graph, vals in rows:
        cells = [method, graph]
        for c, v in enumerate(vals):
            text = str(int(v)) if KINDS[c] == "CR" else f"{v:.3f}"
            if v == best[c]:
                text += "*"
            cells.append(text)
        table_rows.append(cells)
    widths = [max(len(r[c]) for r in table_rows) for c in range(len(header))]
    lines = [
        "  ".join(cell.ljust(widths[c]) for c, cell in enumerate(r)) for r in table_rows
    ]
    return csv_buf.getvalue(), "\n".join(lines) + "\n"
