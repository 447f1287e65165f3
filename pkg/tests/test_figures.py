"""Figure rendering: files are produced and repeated runs are identical."""

import pytest

from padicroots.bounds import verify_report
from padicroots.errors import UsageError
from padicroots.figures import hull_figure, report_summary_figure, save_figure
from padicroots.polynomial import SparsePoly
from padicroots.search import extremal_circuit, random_circuit


class TestHullFigure:
    def test_renders_deterministically(self, tmp_path):
        f = SparsePoly.from_coeffs([8, -6, 1])
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        save_figure(hull_figure(f, 2), str(a))
        save_figure(hull_figure(f, 2), str(b))
        assert a.stat().st_size > 1000
        assert a.read_bytes() == b.read_bytes()

    def test_rejects_zero(self):
        with pytest.raises(UsageError):
            hull_figure(SparsePoly.zero(), 2)


class TestSummaryFigure:
    def test_renders(self, tmp_path):
        reports = [
            verify_report(random_circuit(i % 3, seed=7000 + i), 2, 1) for i in range(6)
        ]
        reports.append(verify_report(extremal_circuit(2, 2), 2, 1))
        out = tmp_path / "summary.png"
        save_figure(report_summary_figure(reports), str(out))
        assert out.stat().st_size > 1000

    def test_rejects_empty(self):
        with pytest.raises(UsageError):
            report_summary_figure([])
