import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvdense import sweep as sw
from cvdense.threshold import v_max


@pytest.fixture(scope="module")
def fig2():
    return sw.sweep_fig2()


def column(rows, name):
    return [r.columns[name] for r in rows]


class TestSweepSpec:
    def test_grids(self):
        assert sw.SweepSpec("v_ne", 0.02, 1.0, 200).grid().size == 200
        g = sw.SweepSpec("n_bar", 0.1, 1e4, 5, "log").grid()
        assert g[0] == pytest.approx(0.1) and g[-1] == pytest.approx(1e4)
        np.testing.assert_allclose(np.diff(np.log(g)), np.log(10) * 5 / 4)

    @pytest.mark.parametrize("kw", [dict(lo=1, hi=0), dict(points=1), dict(spacing="cubic"),
                                    dict(spacing="log", lo=0.0), dict(axis="phase")])
    def test_invalid(self, kw):
        args = dict(axis="n_bar", lo=0.1, hi=1.0, points=10, spacing="linear")
        args.update(kw)
        with pytest.raises(ValueError):
            sw.SweepSpec(**args)


class TestFig2:
    def test_default_layout(self, fig2):
        assert len(fig2) == 200
        assert list(fig2[0].columns)[:3] == [sw.dc_column(0, 1), sw.dc_column(2, 1), sw.dc_column(0, 0.9)]

    def test_peak_at_optimal_squeezing(self, fig2):
        col = column(fig2, sw.dc_column(0, 1))
        i = int(np.nanargmax([c if c is not None else np.nan for c in col]))
        grid = np.array([r.value for r in fig2])
        assert i == int(np.argmin(abs(grid - 1 / 11)))
        assert max(c for c in col if c is not None) <= math.log2(31) + 1e-12

    def test_imperfections_lower_capacity(self, fig2):
        ref = column(fig2, sw.dc_column(0, 1))
        for name in (sw.dc_column(2, 1), sw.dc_column(0, 0.9)):
            for a, b in zip(ref, column(fig2, name)):
                if b is not None:
                    assert a is not None and b <= a

    def test_fock_crossing(self, fig2):
        col = column(fig2, sw.dc_column(0, 1))
        fock = fig2[0].columns["C_Fock"]
        grid = [r.value for r in fig2]
        last = max(i for i, c in enumerate(col) if c is not None and c >= fock)
        assert grid[last] <= v_max(5, 0, 1, "fock").v_max <= grid[last + 1]

    def test_infeasible_cells_are_empty(self):
        rows = sw.sweep_fig2(0.5, [(0.0, 1.0)], [0.05, 0.5, 1.0])
        assert rows[0].columns[sw.dc_column(0, 1)] is None
        assert rows[1].columns[sw.dc_column(0, 1)] is not None

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            sw.sweep_fig2(v_ne_grid=[])

    def test_workers_keep_order(self, fig2):
        par = sw.sweep_fig2(workers=4)
        assert [r.value for r in par] == [r.value for r in fig2]
        assert [r.columns for r in par] == [r.columns for r in fig2]


class TestFig3:
    grid = np.geomspace(0.1, 1e4, 60)

    def test_squeezed_asymptote(self):
        rows = sw.sweep_fig3("sqz", [(0, 1)], self.grid)
        assert rows[-1].columns[sw.vmax_column(0, 1)] == pytest.approx(0.5, abs=1e-3)

    def test_fock_asymptote(self):
        rows = sw.sweep_fig3("fock", [(0, 1)], self.grid)
        assert rows[-1].columns[sw.vmax_column(0, 1)] == pytest.approx(1 / math.e, abs=1e-3)

    def test_fock_below_efficiency_floor_is_empty(self):
        rows = sw.sweep_fig3("fock", [(0, 0.7)], self.grid)
        assert all(r.columns[sw.vmax_column(0, 0.7)] is None for r in rows)

    def test_default_curves(self):
        rows = sw.sweep_fig3(n_bar_grid=[1.0, 100.0])
        assert list(rows[0].columns) == [sw.vmax_column(b, e) for b, e in sw.FIG3_CURVES]


class TestGenericSweep:
    def test_eta_axis(self):
        spec = sw.SweepSpec("eta", 0.5, 1.0, 11, fixed=dict(n_bar=5, v_ne=0.3), benchmarks=("sqz", "fock"))
        rows = sw.sweep(spec)
        dc = column(rows, "C_dc")
        assert all(b > a for a, b in zip(dc, dc[1:]))
        assert rows[-1].columns["v_max(sqz)"] == pytest.approx(v_max(5, 0, 1, "sqz").v_max)

    def test_b_axis_marks_infeasible(self):
        rows = sw.sweep(sw.SweepSpec("b", 0.0, 30.0, 4, fixed=dict(n_bar=5, v_ne=0.3)))
        assert rows[0].columns["C_dc"] is not None and rows[-1].columns["C_dc"] is None


def test_csv_round_trip(fig2):
    text = sw.to_csv(fig2)
    assert "\r" not in text and text.splitlines()[0].startswith("v_ne,")
    back = sw.read_csv(io.StringIO(text))
    assert back == fig2


@given(st.lists(st.one_of(st.none(), st.floats(allow_nan=False, allow_infinity=False)), min_size=1, max_size=6))
def test_csv_round_trip_arbitrary(values):
    rows = [sw.ReportRow("x", float(i), {f"c{j}": v for j, v in enumerate(values)}) for i in range(3)]
    assert sw.read_csv(io.StringIO(sw.to_csv(rows))) == rows


def test_json_digits():
    rows = [sw.ReportRow("n_bar", 1 / 3, {"a": math.pi, "b": None})]
    text = sw.to_json(rows)
    assert "0.333333333333," in text and "3.14159265359" in text and "null" in text
