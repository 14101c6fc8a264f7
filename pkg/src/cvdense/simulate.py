"""Monte Carlo simulation of coherent and dense-coding quadrature channels.

One trial is one independent spectral-mode sample.  Signals are Gaussian,
every optical element is linear, so sample quadratures are all that is
needed: no density matrices.

The building blocks (``squeezed_source``, ``beamsplitter_50_50``,
``apply_loss``) act on arrays of samples drawn from a numpy Generator.  The
production runs (``run_dense_coding``, ``run_single_channel``) go through
the counter-based kernels in ``_kernels`` so that results depend only on
the configuration and seed, never on chunking or worker count.
"""

from __future__ import annotations

import enum
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .capacity import (
    DenseCodingChannel,
    InfeasibleChannelError,
    coherent_heterodyne_capacity,
    coherent_homodyne_capacity,
    dense_coding_capacity,
    dense_coding_snr,
    signal_budget,
)
from ._json import round_floats
from .moments import Moments, tree_reduce

MIN_TRIALS = 10_000


class Scheme(str, enum.Enum):
    COHERENT_HOMODYNE = "coherent-homodyne"
    COHERENT_HETERODYNE = "coherent-heterodyne"
    DENSE_CODING = "dense-coding"


_KERNEL_CODE = {
    Scheme.DENSE_CODING: _kernels.DENSE_CODING,
    Scheme.COHERENT_HOMODYNE: _kernels.COHERENT_HOMODYNE,
    Scheme.COHERENT_HETERODYNE: _kernels.COHERENT_HETERODYNE,
}


@dataclass
class ModeSample:
    """Amplitude (``x``) and phase (``p``) quadrature samples of one mode."""

    x: np.ndarray
    p: np.ndarray

    @classmethod
    def vacuum(cls, rng: np.random.Generator, size: int) -> "ModeSample":
        return cls(rng.standard_normal(size), rng.standard_normal(size))

    def __add__(self, other: "ModeSample") -> "ModeSample":
        return ModeSample(self.x + other.x, self.p + other.p)

    def power(self) -> np.ndarray:
        return self.x**2 + self.p**2


def squeezed_source(v_ne: float, b: float, orientation: str, rng: np.random.Generator,
                    size: int = 1) -> ModeSample:
    """Gaussian squeezed mode with variance ``v_ne`` and ``1/v_ne + b`` on the other axis.

    ``orientation`` is ``"amplitude"`` (x squeezed) or ``"phase"`` (p squeezed).
    """
    if not 0 < v_ne <= 1:
        raise ValueError(f"v_ne must be in (0, 1], got {v_ne}")
    if b < 0:
        raise ValueError(f"b must be >= 0, got {b}")
    squeezed = math.sqrt(v_ne) * rng.standard_normal(size)
    anti = math.sqrt(1.0 / v_ne + b) * rng.standard_normal(size)
    if orientation == "amplitude":
        return ModeSample(squeezed, anti)
    if orientation == "phase":
        return ModeSample(anti, squeezed)
    raise ValueError(f"orientation must be 'amplitude' or 'phase', got {orientation!r}")


def beamsplitter_50_50(a: ModeSample, b: ModeSample) -> tuple[ModeSample, ModeSample]:
    h = math.sqrt(0.5)
    return (ModeSample(h * (a.x + b.x), h * (a.p + b.p)),
            ModeSample(h * (a.x - b.x), h * (a.p - b.p)))


def apply_loss(m: ModeSample, eta: float, rng: np.random.Generator) -> ModeSample:
    """Transmit through efficiency ``eta``; the lost fraction is replaced by vacuum."""
    if not 0 < eta <= 1:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    if eta == 1.0:
        return ModeSample(m.x.copy(), m.p.copy())
    ge, gl = math.sqrt(eta), math.sqrt(1.0 - eta)
    vac = ModeSample.vacuum(rng, np.shape(m.x))
    return ModeSample(ge * m.x + gl * vac.x, ge * m.p + gl * vac.p)


@dataclass(frozen=True)
class SimConfig:
    """A Monte Carlo run.  ``channel.v_ne`` and ``channel.b`` are ignored for coherent schemes.

    ``signal_scale`` multiplies Alice's signal variance without telling the
    analysis, which is how calibration faults are injected.
    """

    scheme: Scheme
    channel: DenseCodingChannel
    trials: int = 1_000_000
    seed: int = 0
    signal_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.trials < MIN_TRIALS:
            raise ValueError(f"trials must be >= {MIN_TRIALS}, got {self.trials}")
        if self.signal_scale < 0:
            raise ValueError("signal_scale must be >= 0")

    @property
    def target_signal_variance(self) -> float:
        """Per-quadrature signal variance that spends exactly ``n_bar`` photons."""
        n = self.channel.n_bar
        if self.scheme is Scheme.COHERENT_HOMODYNE:
            return 4.0 * n
        if self.scheme is Scheme.COHERENT_HETERODYNE:
            return 2.0 * n
        return signal_budget(self.channel)

    @property
    def signal_gain(self) -> float:
        """Amplitude gain from Alice's modulation to Bob's outcome."""
        eta = self.channel.eta
        if self.scheme is Scheme.COHERENT_HOMODYNE:
            return math.sqrt(eta)
        return math.sqrt(eta / 2.0)

    def analytic_snr(self) -> tuple[float, float]:
        ch = self.channel
        if self.scheme is Scheme.COHERENT_HOMODYNE:
            return 4.0 * ch.eta * ch.n_bar, 0.0
        if self.scheme is Scheme.COHERENT_HETERODYNE:
            return ch.eta * ch.n_bar, ch.eta * ch.n_bar
        s = dense_coding_snr(ch)
        return s, s

    def analytic_capacity(self) -> float:
        ch = self.channel
        if self.scheme is Scheme.COHERENT_HOMODYNE:
            return coherent_homodyne_capacity(ch.n_bar, ch.eta)
        if self.scheme is Scheme.COHERENT_HETERODYNE:
            return coherent_heterodyne_capacity(ch.n_bar, ch.eta)
        return dense_coding_capacity(ch)


@dataclass
class SimResult:
    scheme: str
    n_bar: float
    v_ne: float
    b: float
    eta: float
    trials: int
    seed: int
    measured_v_plus: float
    measured_v_minus: float
    n_bar_estimate: float
    signal_variance: float
    signal_variance_estimate: float
    snr_x: float
    snr_p: float
    analytic_snr_x: float
    analytic_snr_p: float
    noise_x: float
    noise_p: float
    capacity_estimate: float
    analytic_capacity: float
    stderr: float

    def to_dict(self) -> dict:
        return asdict(self)


def _regress(m: Moments, y: int, s: int, n: int) -> tuple[float, float, float, float]:
    """Least-squares fit of outcome ``y`` on signal ``s``.

    Returns ``(snr, capacity, stderr, gain)``; snr is the ratio of explained
    to residual variance, i.e. ``rho**2/(1 - rho**2)``.
    """
    cov = m.cov()
    vs, vy, c = cov[s, s], cov[y, y], cov[y, s]
    if vs <= 0.0 or vy <= 0.0:
        return 0.0, 0.0, 0.0, 0.0
    rho2 = min(c * c / (vs * vy), 1.0 - 1e-15)
    snr = rho2 / (1.0 - rho2)
    capacity = -0.5 * math.log2(1.0 - rho2)
    stderr = math.sqrt(rho2) / (math.log(2.0) * math.sqrt(n))
    return snr, capacity, stderr, c / vs


def default_workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))


def accumulate(cfg: SimConfig, workers: Optional[int] = None, backend: Optional[str] = None) -> Moments:
    """Reduce all trials of ``cfg`` to one ``Moments`` over the six observables.

    Chunks are fixed-size and contiguous; ``workers`` only changes which
    thread computes which chunk.  The reduction tree is fixed.
    """
    if backend is None:
        kernel = _kernels.chunk_moments
    elif backend == "numpy":
        kernel = _kernels.chunk_moments_np
    elif backend == "numba":
        if not _kernels.HAVE_NUMBA:
            raise RuntimeError("numba backend unavailable")
        kernel = _kernels.chunk_moments_nb
    else:
        raise ValueError(f"unknown backend {backend!r}")

    ch = cfg.channel
    v_s = cfg.target_signal_variance * cfg.signal_scale
    key = _kernels.seed_key(cfg.seed)
    n_chunks = -(-cfg.trials // _kernels.CHUNK)
    workers = max(1, min(workers or default_workers(), n_chunks))
    bounds = np.linspace(0, n_chunks, workers + 1).round().astype(int)
    args = (_KERNEL_CODE[cfg.scheme], float(ch.v_ne), float(ch.b), float(ch.eta), float(v_s), key, cfg.trials)

    def work(i):
        return kernel(*args, int(bounds[i]), int(bounds[i + 1]))

    if workers == 1:
        pieces = [work(0)]
    else:
        with ThreadPoolExecutor(workers) as pool:
            pieces = list(pool.map(work, range(workers)))
    parts = []
    for counts, means, m2s in pieces:
        parts.extend(Moments(int(n), mu, m2) for n, mu, m2 in zip(counts, means, m2s))
    return tree_reduce(parts)


def _summarise(cfg: SimConfig, m: Moments) -> SimResult:
    ch = cfg.channel
    var = m.var()
    v_plus, v_minus = max(var[0], var[1]), min(var[0], var[1])
    # sample variances of a vacuum beam may dip below the uncertainty bound,
    # so the pair is not validated here
    n_est = 0.25 * (v_plus + v_minus) - 0.5

    snr_x, c_x, se_x, g_x = _regress(m, 4, 2, m.n)
    if cfg.scheme is Scheme.COHERENT_HOMODYNE:
        snr_p, c_p, se_p, g_p = 0.0, 0.0, 0.0, 0.0
    else:
        snr_p, c_p, se_p, g_p = _regress(m, 5, 3, m.n)
    cov = m.cov()
    noise_x = cov[4, 4] - g_x * cov[4, 2]
    noise_p = cov[5, 5] - g_p * cov[5, 3]

    # Alice's calibrated variance, inferred from Bob's regression through the known gain
    gain = cfg.signal_gain
    quads = (2, 4, g_x), (3, 5, g_p)
    if cfg.scheme is Scheme.COHERENT_HOMODYNE:
        quads = quads[:1]
    est = [g * g * cov[s, s] / (gain * gain) for s, _, g in quads]
    snr_a = cfg.analytic_snr()
    return SimResult(
        scheme=cfg.scheme.value,
        n_bar=ch.n_bar,
        v_ne=ch.v_ne,
        b=ch.b,
        eta=ch.eta,
        trials=m.n,
        seed=cfg.seed,
        measured_v_plus=float(v_plus),
        measured_v_minus=float(v_minus),
        n_bar_estimate=float(n_est),
        signal_variance=float(cfg.target_signal_variance),
        signal_variance_estimate=float(np.mean(est)),
        snr_x=float(snr_x),
        snr_p=float(snr_p),
        analytic_snr_x=float(snr_a[0]),
        analytic_snr_p=float(snr_a[1]),
        noise_x=float(noise_x),
        noise_p=float(noise_p),
        capacity_estimate=float(c_x + c_p),
        analytic_capacity=float(cfg.analytic_capacity()),
        stderr=float(math.hypot(se_x, se_p)),
    )


def run_dense_coding(cfg: SimConfig, workers: Optional[int] = None,
                     backend: Optional[str] = None) -> SimResult:
    """Entanglement-assisted channel: two orthogonally squeezed sources, shared pair,
    displacement by Alice, equal loss on both beams, dual homodyne by Bob."""
    if cfg.scheme is not Scheme.DENSE_CODING:
        raise ValueError(f"run_dense_coding needs scheme dense-coding, got {cfg.scheme.value}")
    if not cfg.channel.feasible:
        raise InfeasibleChannelError(cfg.channel.budget)
    return _summarise(cfg, accumulate(cfg, workers, backend))


def run_single_channel(cfg: SimConfig, workers: Optional[int] = None,
                       backend: Optional[str] = None) -> SimResult:
    """Coherent homodyne (signal on x only) or heterodyne (both quadratures, vacuum
    in the empty port of Bob's beamsplitter)."""
    if cfg.scheme is Scheme.DENSE_CODING:
        raise ValueError("run_single_channel handles the coherent schemes only")
    return _summarise(cfg, accumulate(cfg, workers, backend))


def run(cfg: SimConfig, workers: Optional[int] = None, backend: Optional[str] = None) -> SimResult:
    if cfg.scheme is Scheme.DENSE_CODING:
        return run_dense_coding(cfg, workers, backend)
    return run_single_channel(cfg, workers, backend)


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    expected: float
    rel_error: float


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [asdict(c) for c in self.checks]}


def _rel(measured: float, expected: float) -> float:
    # unit floor keeps vacuum-level targets meaningful
    return abs(measured - expected) / max(abs(expected), 1.0)


def verify_channel(r: SimResult, rtol: float = 0.01) -> VerificationReport:
    """Three-step check of a completed run.

    (i) beam variances give back the configured photon number, (ii) the
    signal variance seen by Bob matches Alice's configured variance, (iii)
    the measured S/N matches the analytic value.  Errors are relative with a
    floor of one unit in the denominator.
    """
    rep = VerificationReport()

    def add(name, measured, expected):
        e = _rel(measured, expected)
        rep.checks.append(Check(name, bool(e <= rtol), float(measured), float(expected), float(e)))

    add("photon_number", r.n_bar_estimate, r.n_bar)
    add("signal_variance", r.signal_variance_estimate, r.signal_variance)
    snr_m = (r.snr_x + r.snr_p) / 2.0 if r.scheme != Scheme.COHERENT_HOMODYNE.value else r.snr_x
    snr_a = ((r.analytic_snr_x + r.analytic_snr_p) / 2.0
             if r.scheme != Scheme.COHERENT_HOMODYNE.value else r.analytic_snr_x)
    add("signal_to_noise", snr_m, snr_a)
    return rep


def result_json(r: SimResult, report: Optional[VerificationReport] = None, digits: int = 12) -> str:
    payload = {"result": r.to_dict()}
    if report is not None:
        payload["verification"] = report.to_dict()
    return json.dumps(round_floats(payload, digits), indent=2, sort_keys=False)
