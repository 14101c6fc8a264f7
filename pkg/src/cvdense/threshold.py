"""Thresholds for beating single-channel benchmarks with dense coding.

The central quantity is ``v_max``: the largest squeezed-quadrature variance
for which the dense-coding capacity still reaches a benchmark capacity.
Since capacity is monotone in S/N, every comparison is done on S/N directly:
dense coding wins iff ``snr(V) >= 2**C_bench - 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

from . import capacity as cap

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
BISECT_XTOL = 1e-13
GOLDEN_RTOL = 1e-11


class Benchmark(str, enum.Enum):
    COHERENT_HOMODYNE = "coherent-homodyne"
    COHERENT_HETERODYNE = "coherent-heterodyne"
    SQUEEZED_HOMODYNE = "squeezed-homodyne"
    FOCK = "fock"

    @classmethod
    def parse(cls, name: "str | Benchmark") -> "Benchmark":
        if isinstance(name, Benchmark):
            return name
        key = str(name).strip().lower()
        if key in _ALIASES:
            return _ALIASES[key]
        return cls(key)

    @property
    def short(self) -> str:
        return _SHORT[self]

    def capacity(self, n_bar: float) -> float:
        return _CAPACITY[self](n_bar)

    def required_snr(self, n_bar: float) -> float:
        """S/N that a dense-coding quadrature pair needs to match this benchmark."""
        return math.expm1(self.capacity(n_bar) * cap.LOG2)


_CAPACITY: dict[Benchmark, Callable[[float], float]] = {
    Benchmark.COHERENT_HOMODYNE: cap.coherent_homodyne_capacity,
    Benchmark.COHERENT_HETERODYNE: cap.coherent_heterodyne_capacity,
    Benchmark.SQUEEZED_HOMODYNE: cap.squeezed_homodyne_capacity,
    Benchmark.FOCK: cap.fock_capacity,
}
_SHORT = {
    Benchmark.COHERENT_HOMODYNE: "chom",
    Benchmark.COHERENT_HETERODYNE: "chet",
    Benchmark.SQUEEZED_HOMODYNE: "sqz",
    Benchmark.FOCK: "fock",
}
_ALIASES = {v: k for k, v in _SHORT.items()}


class UnsupportedBenchmarkError(ValueError):
    pass


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of a ``v_max`` solve.

    ``v_max`` is None when dense coding cannot reach the benchmark at any
    squeezing.  ``at_edge`` marks results pinned to the top of the search
    domain (no squeezing needed, or the feasibility root below 1); their
    residual is a margin rather than a root residual.
    """

    v_max: Optional[float]
    benchmark: Benchmark
    n_bar: float
    b: float
    eta: float
    iterations: int
    residual: float
    v_peak: Optional[float] = None
    at_edge: bool = False

    @property
    def found(self) -> bool:
        return self.v_max is not None


def golden_max(f: Callable[[float], float], a: float, b: float,
               rtol: float = GOLDEN_RTOL) -> tuple[float, float, int]:
    """Golden-section search for the maximum of a unimodal ``f`` on ``[a, b]``.

    Returns ``(x, f(x), iterations)``.
    """
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while (b - a) > rtol * (abs(a) + abs(b)) + 1e-300:
        it += 1
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = c if fc >= fd else d
    fx = max(fc, fd)
    # endpoints may win when the peak sits on the boundary
    for edge in (a, b):
        fe = f(edge)
        if fe > fx:
            x, fx = edge, fe
    return x, fx, it


def bisect_last_true(pred: Callable[[float], bool], lo: float, hi: float,
                     xtol: float = BISECT_XTOL) -> tuple[float, float, int]:
    """Shrink ``[lo, hi]`` with ``pred(lo)`` true and ``pred(hi)`` false.

    Returns the final ``(lo, hi, iterations)``; ``lo`` always satisfies ``pred``.
    """
    it = 0
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            lo = mid
        else:
            hi = mid
        it += 1
    return lo, hi, it


def snr_function(n_bar: float, b: float, eta: float) -> Callable[[float], float]:
    """Dense-coding S/N as a function of ``v_ne``; caller keeps V feasible."""
    c = 4.0 * n_bar + 2.0 - b
    loss = 1.0 - eta

    def snr(v: float) -> float:
        return eta * max(c - v - 1.0 / v, 0.0) / (4.0 * (eta * v + loss))

    return snr


def search_domain(n_bar: float, b: float) -> Optional[tuple[float, float]]:
    """Feasible squeezed variances, clipped to ``v_ne <= 1``."""
    roots = cap.feasible_interval(n_bar, b)
    if roots is None:
        return None
    lo, hi = roots
    if lo > 1.0:
        return None
    return lo, min(hi, 1.0)


def peak_snr(n_bar: float, b: float = 0.0, eta: float = 1.0) -> Optional[tuple[float, float, int]]:
    """Numerically locate the S/N peak over squeezing: ``(v_peak, snr_peak, iterations)``."""
    dom = search_domain(n_bar, b)
    if dom is None:
        return None
    lo, hi = dom
    if hi <= lo:
        return lo, 0.0, 0
    return golden_max(snr_function(n_bar, b, eta), lo, hi)


def max_dense_coding_capacity(n_bar: float, b: float = 0.0, eta: float = 1.0) -> Optional[float]:
    """Best dense-coding capacity over squeezing, or None if nothing is feasible."""
    pk = peak_snr(n_bar, b, eta)
    if pk is None:
        return None
    return math.log2(1.0 + pk[1])


def peak_squeezing_closed_form(n_bar: float, b: float = 0.0, eta: float = 1.0) -> float:
    """Stationary point of the S/N in ``v_ne`` (unclipped).

    Solves ``(1 - eta + eta*c)*V**2 - 2*eta*V - (1 - eta) = 0`` with
    ``c = 4*n_bar + 2 - b``; reduces to ``2/c`` at unit efficiency.
    Kept as a test oracle; the solver always searches numerically.
    """
    c = 4.0 * n_bar + 2.0 - b
    a = 1.0 - eta + eta * c
    return (eta + math.sqrt(eta * eta + (1.0 - eta) * a)) / a


def v_max(n_bar: float, b: float = 0.0, eta: float = 1.0,
          bench: "Benchmark | str" = Benchmark.SQUEEZED_HOMODYNE) -> ThresholdResult:
    """Largest squeezed variance at which dense coding matches ``bench``."""
    bench = Benchmark.parse(bench)
    if not n_bar > 0:
        raise ValueError(f"n_bar must be > 0, got {n_bar}")
    if not 0 < eta <= 1:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    if not b >= 0:
        raise ValueError(f"b must be >= 0, got {b}")

    c_bench = bench.capacity(n_bar)
    required = bench.required_snr(n_bar)
    absent = ThresholdResult(None, bench, n_bar, b, eta, 0, math.inf)

    dom = search_domain(n_bar, b)
    if dom is None:
        return absent
    lo, top = dom
    snr = snr_function(n_bar, b, eta)
    v_pk, snr_pk, it_g = golden_max(snr, lo, top) if top > lo else (lo, 0.0, 0)
    if snr_pk < required:
        return ThresholdResult(None, bench, n_bar, b, eta, it_g,
                               abs(math.log2(1.0 + snr_pk) - c_bench), v_pk)

    def residual(v):
        return abs(math.log2(1.0 + snr(v)) - c_bench)

    if snr(top) >= required:
        return ThresholdResult(top, bench, n_bar, b, eta, it_g, residual(top),
                               v_pk, at_edge=True)

    v, _, it_b = bisect_last_true(lambda v: snr(v) >= required, v_pk, top)
    return ThresholdResult(v, bench, n_bar, b, eta, it_g + it_b, residual(v), v_pk)


def v_max_quadratic(n_bar: float, required_snr: float) -> float:
    """Closed-form ``v_max`` for pure sources and unit efficiency.

    Upper root of ``(4R + 1)*V**2 - (4*n_bar + 2)*V + 1 = 0``.
    """
    a = 4.0 * required_snr + 1.0
    c = 4.0 * n_bar + 2.0
    disc = c * c - 4.0 * a
    if disc < 0:
        raise ValueError("benchmark is unreachable at this photon number")
    return (c + math.sqrt(disc)) / (2.0 * a)


def crossover_photon_number(bench: "Benchmark | str", b: float = 0.0, eta: float = 1.0,
                            n_lo: float = 1e-6, n_hi: float = 1e7,
                            scan_points: int = 400, xtol: float = 1e-9) -> Optional[float]:
    """Smallest ``n_bar`` above which optimised dense coding beats ``bench``.

    Scans a log grid for the first sign change of
    ``max_V C_dc - C_bench`` and bisects it.  Returns 0.0 when dense coding
    already wins at ``n_lo`` and None when it never wins below ``n_hi``.
    """
    bench = Benchmark.parse(bench)

    def gap(n):
        best = max_dense_coding_capacity(n, b, eta)
        if best is None:
            return -math.inf
        return best - bench.capacity(n)

    ratio = (n_hi / n_lo) ** (1.0 / (scan_points - 1))
    prev = None
    n = n_lo
    for i in range(scan_points):
        n = n_lo * ratio**i
        if gap(n) > 0:
            if prev is None:
                return 0.0
            _, hi, _ = bisect_last_true(lambda x: gap(x) <= 0, prev, n, xtol)
            return hi
        prev = n
    return None


# Large-photon-number limits.  With n_bar -> infinity the S/N tends to
# eta*n_bar/(eta*V + 1 - eta).  Squeezed benchmark needs 2*n_bar, giving
# V = 3/2 - 1/eta; the Fock benchmark needs e*n_bar (its capacity tends to
# log2(e*n_bar)), giving V = 1/e + 1 - 1/eta.  Neither depends on b.

def eta_min(bench: "Benchmark | str") -> float:
    """Efficiency below which ``v_max`` vanishes at every photon number."""
    bench = Benchmark.parse(bench)
    if bench is Benchmark.SQUEEZED_HOMODYNE:
        return 2.0 / 3.0
    if bench is Benchmark.FOCK:
        return math.e / (1.0 + math.e)
    raise UnsupportedBenchmarkError(f"no minimum efficiency for benchmark {bench.value!r}")


def v_max_asymptote(bench: "Benchmark | str", eta: float = 1.0) -> Optional[float]:
    bench = Benchmark.parse(bench)
    floor = eta_min(bench)
    if eta <= floor:
        return None
    if bench is Benchmark.SQUEEZED_HOMODYNE:
        return 1.5 - 1.0 / eta
    return 1.0 / math.e + 1.0 - 1.0 / eta
