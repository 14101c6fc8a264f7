"""Closed-form channel capacities for Gaussian quadrature channels.

All variances are in shot-noise units (vacuum = 1) and every capacity is in
bits per channel use.  The dense-coding channel is described by four numbers:
mean photon number ``n_bar``, squeezed-quadrature variance ``v_ne`` of each
entanglement source, excess noise ``b`` on the anti-squeezed quadrature and
detection efficiency ``eta`` (propagation loss folded in).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

LOG2 = math.log(2.0)

# n_bar*log2(n_bar) is replaced by its limit below this
_FOCK_GUARD = 1e-12
# relative slack when deciding that a signal budget is negative
_BUDGET_RTOL = 1e-12


class InfeasibleChannelError(ValueError):
    """The photon budget cannot pay for the entanglement at this operating point.

    ``budget`` is the (negative) value of ``4*n_bar + 2 - v_ne - 1/v_ne - b``.
    """

    def __init__(self, budget: float, message: Optional[str] = None):
        self.budget = budget
        if message is None:
            message = (
                f"infeasible dense-coding channel: signal budget "
                f"4*n_bar + 2 - v_ne - 1/v_ne - b = {budget:.6g} < 0"
            )
        super().__init__(message)


def _check_n_bar(n_bar: float) -> float:
    n_bar = float(n_bar)
    if not n_bar >= 0.0:
        raise ValueError(f"mean photon number must be >= 0, got {n_bar}")
    return n_bar


@dataclass(frozen=True)
class QuadraturePair:
    """Maximum and minimum quadrature variances of one optical mode."""

    v_plus: float
    v_minus: float

    def __post_init__(self):
        if not (self.v_plus > 0 and self.v_minus > 0):
            raise ValueError("quadrature variances must be positive")
        if self.v_plus < self.v_minus:
            raise ValueError("v_plus must be >= v_minus")
        if self.v_plus * self.v_minus < 1.0 - 1e-12:
            raise ValueError(
                f"uncertainty bound violated: v_plus*v_minus = "
                f"{self.v_plus * self.v_minus:.6g} < 1"
            )

    @classmethod
    def from_variances(cls, va: float, vb: float) -> "QuadraturePair":
        """Build from two orthogonal variances given in any order."""
        return cls(max(va, vb), min(va, vb))

    @property
    def is_pure(self) -> bool:
        return abs(self.v_plus * self.v_minus - 1.0) <= 1e-12


@dataclass(frozen=True)
class DenseCodingChannel:
    """Operating point of the dense-coding channel.

    Construction only checks parameter ranges.  Feasibility (a non-negative
    signal budget) is a property, because sweeps need to represent
    infeasible points without raising.
    """

    n_bar: float
    v_ne: float = 1.0
    b: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        if not self.n_bar >= 0:
            raise ValueError(f"n_bar must be >= 0, got {self.n_bar}")
        if not 0 < self.v_ne <= 1:
            raise ValueError(f"v_ne must be in (0, 1], got {self.v_ne}")
        if not self.b >= 0:
            raise ValueError(f"excess noise b must be >= 0, got {self.b}")
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")

    @property
    def budget(self) -> float:
        """Numerator of the dense-coding SNR before the efficiency factor."""
        return 4.0 * self.n_bar + 2.0 - self.v_ne - 1.0 / self.v_ne - self.b

    @property
    def feasible(self) -> bool:
        return self.budget >= -_BUDGET_RTOL * (4.0 * self.n_bar + 2.0)

    def replace(self, **changes) -> "DenseCodingChannel":
        fields = dict(n_bar=self.n_bar, v_ne=self.v_ne, b=self.b, eta=self.eta)
        fields.update(changes)
        return DenseCodingChannel(**fields)


def _checked_budget(ch: DenseCodingChannel) -> float:
    if not ch.feasible:
        raise InfeasibleChannelError(ch.budget)
    return max(ch.budget, 0.0)


def shannon_capacity(s: float, n: float) -> float:
    """Capacity of a Gaussian channel with signal power ``s`` and noise power ``n``."""
    if not n > 0:
        raise ValueError(f"noise power must be positive, got {n}")
    if not s >= 0:
        raise ValueError(f"signal power must be >= 0, got {s}")
    return 0.5 * math.log2(1.0 + s / n)


def mean_photon_number(q: QuadraturePair) -> float:
    """Photons per bandwidth per second carried by a beam with variances ``q``."""
    return 0.25 * (q.v_plus + q.v_minus) - 0.5


def coherent_homodyne_capacity(n_bar: float, eta: float = 1.0) -> float:
    """Single-quadrature coherent encoding read out by homodyne detection.

    With ``eta < 1`` the detected signal is ``eta*V_s`` over unchanged vacuum
    noise, giving ``log2(sqrt(1 + 4*eta*n_bar))``.
    """
    n_bar = _check_n_bar(n_bar)
    return 0.5 * math.log2(1.0 + 4.0 * eta * n_bar)


def coherent_heterodyne_capacity(n_bar: float, eta: float = 1.0) -> float:
    """Dual-quadrature coherent encoding read out by heterodyne detection.

    Two half-channels, each with S/N = eta*V_s/2 where V_s = 2*n_bar.
    """
    n_bar = _check_n_bar(n_bar)
    return math.log2(1.0 + eta * n_bar)


def squeezed_homodyne_capacity(n_bar: float) -> float:
    """Squeezed-state single-quadrature channel at its optimal squeezing."""
    n_bar = _check_n_bar(n_bar)
    return math.log2(1.0 + 2.0 * n_bar)


def fock_capacity(n_bar: float) -> float:
    """Number-state (Holevo) capacity, the single-mode maximum."""
    n_bar = _check_n_bar(n_bar)
    if n_bar < _FOCK_GUARD:
        return (1.0 + n_bar) * math.log2(1.0 + n_bar)
    return (1.0 + n_bar) * math.log2(1.0 + n_bar) - n_bar * math.log2(n_bar)


def dense_coding_snr(ch: DenseCodingChannel) -> float:
    """Per-quadrature signal to noise detected by Bob.

    Raises InfeasibleChannelError when the signal budget is negative.
    """
    budget = _checked_budget(ch)
    return ch.eta * budget / (4.0 * (ch.eta * ch.v_ne + 1.0 - ch.eta))


def dense_coding_capacity(ch: DenseCodingChannel) -> float:
    """Dense-coding capacity with impure entanglement and lossy detection."""
    return math.log2(1.0 + dense_coding_snr(ch))


def dense_coding_optimal_capacity(n_bar: float) -> float:
    """Pure entanglement, unit efficiency, squeezing optimised for ``n_bar``."""
    n_bar = _check_n_bar(n_bar)
    return math.log2(1.0 + n_bar + n_bar * n_bar)


def dense_coding_impure_optimal(n_bar: float, b: float) -> tuple[float, float]:
    """Optimal capacity and squeezing when the sources carry excess noise ``b``.

    Returns ``(capacity, v_ne_opt)`` with ``v_ne_opt = 2/(4*n_bar + 2 - b)``.
    Unit detection efficiency is assumed.  For ``b > 4*n_bar`` the returned
    optimum lies above 1, i.e. outside the squeezed regime.
    """
    n_bar = _check_n_bar(n_bar)
    if not b >= 0:
        raise ValueError(f"excess noise b must be >= 0, got {b}")
    c = 4.0 * n_bar + 2.0 - b
    if c <= 0:
        raise InfeasibleChannelError(
            c, f"excess noise b = {b} must be below 4*n_bar + 2 = {4 * n_bar + 2}"
        )
    snr = n_bar + n_bar * n_bar - b * (0.25 + 0.5 * n_bar) + 0.0625 * b * b
    return math.log2(1.0 + snr), 2.0 / c


def optimal_squeezing(n_bar: float) -> float:
    """Squeezed variance that maximises S/N at fixed ``n_bar`` (pure states)."""
    n_bar = _check_n_bar(n_bar)
    return 1.0 / (1.0 + 2.0 * n_bar)


def signal_budget(ch: DenseCodingChannel) -> float:
    """Alice's per-quadrature signal variance that spends exactly ``n_bar`` photons."""
    return 0.5 * _checked_budget(ch)


def feasible_interval(n_bar: float, b: float = 0.0) -> Optional[tuple[float, float]]:
    """Roots of ``V**2 - (4*n_bar + 2 - b)*V + 1``; the budget is >= 0 between them.

    Returns None when the quadratic has no real roots.  The roots multiply to
    one, so the lower one is the relevant squeezed variance.
    """
    c = 4.0 * _check_n_bar(n_bar) + 2.0 - b
    if c < 2.0:
        return None
    disc = math.sqrt(max(c * c - 4.0, 0.0))
    hi = 0.5 * (c + disc)
    return 1.0 / hi, hi


def squeezing_percent(v_ne: float) -> float:
    """Squeezing quoted as a percentage below shot noise."""
    return (1.0 - v_ne) * 100.0


def squeezing_db(v_ne: float) -> float:
    return 10.0 * math.log10(v_ne)


@dataclass
class CapacityReport:
    """All capacities at one operating point; ``dense_coding`` is None if infeasible."""

    channel: DenseCodingChannel
    coherent_homodyne: float
    coherent_heterodyne: float
    squeezed_homodyne: float
    fock: float
    dense_coding: Optional[float]
    dense_coding_optimal: float
    v_ne_opt: float
    signal_budget: Optional[float]
    budget: float

    @property
    def feasible(self) -> bool:
        return self.dense_coding is not None


def capacity_report(ch: DenseCodingChannel) -> CapacityReport:
    if ch.feasible:
        c_dc, v_s = dense_coding_capacity(ch), signal_budget(ch)
    else:
        c_dc = v_s = None
    return CapacityReport(
        channel=ch,
        coherent_homodyne=coherent_homodyne_capacity(ch.n_bar),
        coherent_heterodyne=coherent_heterodyne_capacity(ch.n_bar),
        squeezed_homodyne=squeezed_homodyne_capacity(ch.n_bar),
        fock=fock_capacity(ch.n_bar),
        dense_coding=c_dc,
        dense_coding_optimal=dense_coding_optimal_capacity(ch.n_bar),
        v_ne_opt=optimal_squeezing(ch.n_bar),
        signal_budget=v_s,
        budget=ch.budget,
    )
