"""Parameter sweeps over the capacity formulas and their CSV/JSON emitters.

Rows carry an axis value plus named columns.  ``None`` marks an absent value
(infeasible operating point, or no threshold) and is written as an empty CSV
cell so that plotting tools skip it.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import capacity as cap
from ._json import round_floats
from .threshold import Benchmark, v_max

AXES = ("v_ne", "n_bar", "eta", "b")

FIG2_SCENARIOS = ((0.0, 1.0), (2.0, 1.0), (0.0, 0.9))
FIG3_CURVES = ((0.0, 1.0), (2.0, 1.0), (5.0, 1.0), (0.0, 0.9), (0.0, 0.8))


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    lo: float
    hi: float
    points: int
    spacing: str = "linear"
    fixed: dict = field(default_factory=dict)
    benchmarks: tuple = ()

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.points < 2:
            raise ValueError(f"a sweep needs at least 2 points, got {self.points}")
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.spacing not in ("linear", "log"):
            raise ValueError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.spacing == "log" and self.lo <= 0:
            raise ValueError("log spacing needs lo > 0")

    def grid(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass
class ReportRow:
    axis: str
    value: float
    columns: dict[str, Optional[float]]


def dc_column(b: float, eta: float) -> str:
    return f"C_dc(b={b:g};eta={eta:g})"


def vmax_column(b: float, eta: float) -> str:
    return f"v_max(b={b:g};eta={eta:g})"


def _benchmark_columns(n_bar: float) -> dict[str, float]:
    return {
        "C_c": cap.coherent_homodyne_capacity(n_bar),
        "C_ch": cap.coherent_heterodyne_capacity(n_bar),
        "C_sh": cap.squeezed_homodyne_capacity(n_bar),
        "C_Fock": cap.fock_capacity(n_bar),
    }


def _dense_or_none(ch: cap.DenseCodingChannel) -> Optional[float]:
    return cap.dense_coding_capacity(ch) if ch.feasible else None


def _map_ordered(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


def sweep(spec: SweepSpec, workers: int = 1) -> list[ReportRow]:
    """Evaluate every capacity along one channel parameter.

    Columns: the four benchmark capacities, ``C_dc`` and, per requested
    benchmark, ``v_max(<short name>)`` at the row's ``(n_bar, b, eta)``.
    """
    base = dict(n_bar=5.0, v_ne=1.0, b=0.0, eta=1.0)
    base.update(spec.fixed)
    benches = [Benchmark.parse(x) for x in spec.benchmarks]

    def row(x):
        params = dict(base, **{spec.axis: float(x)})
        ch = cap.DenseCodingChannel(**params)
        cols = {"C_dc": _dense_or_none(ch), **_benchmark_columns(ch.n_bar)}
        for bench in benches:
            cols[f"v_max({bench.short})"] = (
                v_max(ch.n_bar, ch.b, ch.eta, bench).v_max if ch.n_bar > 0 else None)
        return ReportRow(spec.axis, float(x), cols)

    return _map_ordered(row, spec.grid(), workers)


def sweep_fig2(n_bar: float = 5.0, scenarios: Iterable[tuple[float, float]] = FIG2_SCENARIOS,
               v_ne_grid: Optional[Sequence[float]] = None, workers: int = 1) -> list[ReportRow]:
    """Dense-coding capacity against squeezing at fixed photon number."""
    if v_ne_grid is None:
        v_ne_grid = SweepSpec("v_ne", 0.02, 1.0, 200).grid()
    if len(v_ne_grid) == 0:
        raise ValueError("empty v_ne grid")
    scenarios = list(scenarios)
    bench = _benchmark_columns(n_bar)

    def row(v):
        cols = {dc_column(b, eta): _dense_or_none(cap.DenseCodingChannel(n_bar, float(v), b, eta))
                for b, eta in scenarios}
        cols["C_sh"] = bench["C_sh"]
        cols["C_Fock"] = bench["C_Fock"]
        cols["C_c"] = bench["C_c"]
        cols["C_ch"] = bench["C_ch"]
        return ReportRow("v_ne", float(v), cols)

    return _map_ordered(row, list(v_ne_grid), workers)


def sweep_fig3(bench: "Benchmark | str" = Benchmark.SQUEEZED_HOMODYNE,
               curves: Iterable[tuple[float, float]] = FIG3_CURVES,
               n_bar_grid: Optional[Sequence[float]] = None, workers: int = 1) -> list[ReportRow]:
    """Threshold squeezing ``v_max`` against photon number, one column per ``(b, eta)``."""
    bench = Benchmark.parse(bench)
    if n_bar_grid is None:
        n_bar_grid = SweepSpec("n_bar", 0.1, 1e4, 200, "log").grid()
    if len(n_bar_grid) == 0:
        raise ValueError("empty n_bar grid")
    curves = list(curves)

    def row(n):
        cols = {vmax_column(b, eta): v_max(float(n), b, eta, bench).v_max for b, eta in curves}
        return ReportRow("n_bar", float(n), cols)

    return _map_ordered(row, list(n_bar_grid), workers)


def _cell(v: Optional[float]) -> str:
    if v is None or not math.isfinite(v):
        return ""
    return repr(float(v))


def write_csv(rows: Sequence[ReportRow], fh) -> None:
    """Header row, then one line per row; LF endings; empty cell for absent values."""
    if not rows:
        raise ValueError("no rows to write")
    names = list(rows[0].columns)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow([rows[0].axis, *names])
    for r in rows:
        w.writerow([_cell(r.value), *(_cell(r.columns.get(k)) for k in names)])


def to_csv(rows: Sequence[ReportRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv(fh) -> list[ReportRow]:
    reader = csv.reader(fh)
    header = next(reader)
    axis, names = header[0], header[1:]
    rows = []
    for rec in reader:
        if not rec:
            continue
        cols = {k: (float(c) if c != "" else None) for k, c in zip(names, rec[1:])}
        rows.append(ReportRow(axis, float(rec[0]), cols))
    return rows


def to_json(rows: Sequence[ReportRow], digits: int = 12) -> str:
    payload = [{r.axis: r.value, **r.columns} for r in rows]
    return json.dumps(round_floats(payload, digits), indent=2)
