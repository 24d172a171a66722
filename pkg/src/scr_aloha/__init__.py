"""Analytics, optimization, and simulation for K-resolution slotted ALOHA.

A contention slot of length K time units resolves all transmissions when at
most K users transmit, and none otherwise; the receiver always learns the
exact multiplicity.  This package provides the closed-form performance
analytics of that channel, the optimal access parameter solver, the
pseudo-Bayesian backlog estimator, a seeded closed-loop simulator, and a
desk-scale signature codec realizing the multiplicity feedback over prime
fields.
"""

__version__ = "0.1.0"

from .alpha_solver import AlphaEntry, design_table, solve_alpha
from .analytics import (
    ContentionPoint,
    expected_resolved,
    expected_throughput,
    optimal_q,
    outcome_probabilities,
    posterior_mean,
    posterior_pmf,
    throughput_lower_bound,
)
from .estimator import EstimatorState, init_state, update
from .signatures import (
    Codebook,
    adder_channel,
    benchmark_length_bits,
    construct_codebook,
    decode,
    verify_codebook,
)
from .sim import (
    SimConfig,
    SimTrace,
    SlotOutcome,
    SweepPoint,
    detect_drift,
    run_saturation,
    run_simulation,
    sweep_lambda,
)
from .special import poisson_cdf, poisson_pmf, regularized_upper_gamma

__all__ = [
    "__version__",
    "AlphaEntry",
    "design_table",
    "solve_alpha",
    "ContentionPoint",
    "expected_resolved",
    "expected_throughput",
    "optimal_q",
    "outcome_probabilities",
    "posterior_mean",
    "posterior_pmf",
    "throughput_lower_bound",
    "EstimatorState",
    "init_state",
    "update",
    "Codebook",
    "adder_channel",
    "benchmark_length_bits",
    "construct_codebook",
    "decode",
    "verify_codebook",
    "SimConfig",
    "SimTrace",
    "SlotOutcome",
    "SweepPoint",
    "detect_drift",
    "run_saturation",
    "run_simulation",
    "sweep_lambda",
    "poisson_cdf",
    "poisson_pmf",
    "regularized_upper_gamma",
]
