"""Capacities, thresholds and Monte Carlo checks for continuous-variable dense coding."""

from .capacity import (
    CapacityReport,
    DenseCodingChannel,
    InfeasibleChannelError,
    QuadraturePair,
    capacity_report,
    coherent_heterodyne_capacity,
    coherent_homodyne_capacity,
    dense_coding_capacity,
    dense_coding_impure_optimal,
    dense_coding_optimal_capacity,
    fock_capacity,
    mean_photon_number,
    optimal_squeezing,
    shannon_capacity,
    signal_budget,
    squeezed_homodyne_capacity,
)
from .simulate import SimConfig, SimResult, run, run_dense_coding, run_single_channel, verify_channel
from .threshold import (
    Benchmark,
    ThresholdResult,
    crossover_photon_number,
    eta_min,
    v_max,
    v_max_asymptote,
)

__version__ = "0.1.0"
