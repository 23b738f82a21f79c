"""Nine-way evaluation, inverted-export convention, tables."""

import csv
import io

import numpy as np
import pytest

import gdlayout as gd
from gdlayout.quality import CSV_HEADER, QualityReport, csv_row, evaluate_all, report_table


def grid_unit_layout(rows, cols):
    return np.array([[c, r] for r in range(rows) for c in range(cols)], dtype=float)


class TestEvaluateAll:
    def test_planar_grid(self):
        g = gd.generate_grid(3, 4)
        rep = evaluate_all(g, grid_unit_layout(3, 4))
        assert rep.crossings == 0
        assert rep.neighborhood == pytest.approx(1.0)
        assert rep.crossing_angle == 0.0
        assert rep.gabriel > 0.99

    def test_k5_has_crossings(self):
        import itertools

        g = gd.Graph(5, tuple(itertools.combinations(range(5), 2)))
        X = gd.init_layout(5, 3)
        assert evaluate_all(g, X).crossings >= 1

    def test_deterministic(self):
        g = gd.generate_grid(3, 3)
        X = gd.init_layout(g.n, 1)
        a = evaluate_all(g, X)
        b = evaluate_all(g, X)
        assert a == b

    def test_inverted_export_exact(self):
        g = gd.generate_grid(3, 3)
        X = gd.init_layout(g.n, 2)
        rep = evaluate_all(g, X)
        raw = rep.as_dict()
        exp = rep.exported()
        for k in ("NP", "AR", "ANR", "VR", "GB"):
            assert exp[k] == 1.0 - raw[k]
        for k in ("ST", "IL", "CR", "CAM"):
            assert exp[k] == raw[k]


class TestTables:
    def _entries(self, count):
        g = gd.generate_grid(2, 3)
        out = []
        for s in range(count):
            X = gd.init_layout(g.n, s)
            out.append((f"m{s}", g.name, evaluate_all(g, X)))
        return out

    def test_single_row(self):
        csv_text, table = report_table(self._entries(1))
        assert csv_text.count("\n") == 2  # header + one row
        assert "m0" in table

    def test_best_marker_on_smaller(self):
        e = self._entries(2)
        stress_vals = [r.stress for _, _, r in e]
        _, table = report_table(e)
        winner = f"m{int(np.argmin(stress_vals))}"
        for line in table.splitlines():
            if line.startswith(winner):
                assert "*" in line

    def test_csv_roundtrips(self):
        csv_text, _ = report_table(self._entries(2))
        rows = list(csv.reader(io.StringIO(csv_text)))
        assert rows[0] == CSV_HEADER.split(",")
        assert len(rows) == 3
        for row in rows[1:]:
            assert len(row) == 11
            float(row[3])  # NP column parses

    def test_header_schema(self):
        assert CSV_HEADER == "method,graph,ST,IL,NP,CR,CAM,AR,ANR,VR,GB"

    def test_two_node_vr_exports_zero(self):
        g = gd.Graph(2, ((0, 1),))
        X = np.array([[0.0, 0.0], [1.0, 0.0]])
        rep = evaluate_all(g, X)
        row = csv_row("m", "g", rep)
        vr_col = row.split(",")[CSV_HEADER.split(",").index("VR")]
        assert float(vr_col) == pytest.approx(0.0)  # 1 - Q_VR with Q_VR = 1
