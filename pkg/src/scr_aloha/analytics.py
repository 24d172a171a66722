"""Closed-form performance quantities for the K-resolution contention slot.

All formulas treat the backlog as Poisson with mean n_hat and every backlogged
user transmitting independently with probability q, so the number of
transmitters C is Poisson with mean g = q * n_hat.  The slot resolves all C
transmissions when C <= K and none otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .alpha_solver import solve_alpha
from .special import poisson_pmf, regularized_upper_gamma

__all__ = [
    "ContentionPoint",
    "expected_resolved",
    "expected_resolved_at_load",
    "expected_throughput",
    "outcome_probabilities",
    "posterior_mean",
    "posterior_pmf",
    "throughput_lower_bound",
    "optimal_q",
]


@dataclass(frozen=True)
class ContentionPoint:
    """Operating point of one contention slot.

    n_hat is the Poisson mean of the backlog, q the per-user access
    probability, K the resolution depth.  The offered load is g = q * n_hat.
    """

    n_hat: float
    q: float
    K: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.n_hat) or self.n_hat < 0.0:
            raise ValueError(f"n_hat must be finite and >= 0, got {self.n_hat!r}")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must be in [0, 1], got {self.q!r}")
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K!r}")

    @property
    def load(self) -> float:
        """Offered load g = q * n_hat (mean number of transmitters)."""
        return self.q * self.n_hat


def expected_resolved_at_load(k: int, g: float) -> float:
    """E[S] for a Poisson(g) number of transmitters: g * Q(K, g).

    The identity sum_{c=0}^{K} c * pmf(g; c) = g * P[Poisson(g) <= K-1] folds
    the truncated first moment into a single CDF evaluation.
    """
    if g < 0.0 or not math.isfinite(g):
        raise ValueError(f"offered load must be finite and >= 0, got {g!r}")
    if g == 0.0:
        return 0.0
    return g * regularized_upper_gamma(k, g)


def expected_resolved(point: ContentionPoint) -> float:
    """Expected number of users resolved in one slot at the operating point."""
    return expected_resolved_at_load(point.K, point.load)


def expected_throughput(k: int, alpha: float) -> float:
    """Resolved users per channel use at offered load alpha: E[S]/K.

    The slot lasts K time units, so throughput normalizes E[S] by K.
    """
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    return expected_resolved_at_load(k, alpha) / k


def outcome_probabilities(k: int, g: float) -> tuple[float, float, float]:
    """(p_idle, p_resolved, p_unresolvable) for offered load g.

    p_idle = e^{-g}, p_unresolvable = P[C > K] = 1 - Q(K+1, g), and
    p_resolved covers 1 <= C <= K; the three sum to 1.
    """
    if g < 0.0 or not math.isfinite(g):
        raise ValueError(f"offered load must be finite and >= 0, got {g!r}")
    if int(k) != k or k < 1:
        raise ValueError(f"K must be a positive integer, got {k!r}")
    p_idle = math.exp(-g)
    p_unresolvable = 1.0 - regularized_upper_gamma(int(k) + 1, g)
    p_resolved = 1.0 - p_idle - p_unresolvable
    # tiny negative values are pure roundoff (e.g. g = 0)
    if p_resolved < 0.0:
        p_resolved = 0.0
    return p_idle, p_resolved, p_unresolvable


def posterior_mean(point: ContentionPoint, c: int) -> float:
    """Expected backlog remaining after a slot in which c users transmitted.

    Conditioned on c transmitters, the non-transmitting backlog is Poisson
    with mean (1-q) * n_hat.  When c <= K all transmitters are resolved and
    only that remainder is left; when c > K none are resolved and the c
    transmitters stay backlogged.
    """
    if int(c) != c or c < 0:
        raise ValueError(f"c must be a nonnegative integer, got {c!r}")
    c = int(c)
    rest = (1.0 - point.q) * point.n_hat
    if c <= point.K:
        return rest
    return c + rest


def posterior_pmf(point: ContentionPoint, c: int, n: int) -> float:
    """P[backlog = n + c | c transmitted]: Poisson pmf at n with mean (1-q)n_hat.

    Bayes' rule on a Poisson(n_hat) prior thinned by q leaves the count of
    non-transmitters Poisson with mean (1-q) * n_hat, independent of c.
    """
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    if int(c) != c or c < 0:
        raise ValueError(f"c must be a nonnegative integer, got {c!r}")
    return poisson_pmf((1.0 - point.q) * point.n_hat, int(n))


def throughput_lower_bound(k: int, delta: float) -> float:
    """Guaranteed throughput delta * Q(K, delta*K) at fixed offered load delta*K.

    Running the slot at load g = delta*K yields E[T] = delta * Q(K, delta*K),
    which tends to delta as K grows; any target below 1 is reachable with
    large enough K.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta!r}")
    if int(k) != k or k < 1:
        raise ValueError(f"K must be a positive integer, got {k!r}")
    return delta * regularized_upper_gamma(int(k), delta * k)


def optimal_q(k: int, n_hat: float) -> float:
    """Access probability min{alpha(K)/n_hat, 1} maximizing resolved users.

    For n_hat <= alpha (including n_hat = 0) the clamp returns 1: every
    backlogged user should transmit when the backlog is small.
    """
    if n_hat < 0.0 or not math.isfinite(n_hat):
        raise ValueError(f"n_hat must be finite and >= 0, got {n_hat!r}")
    alpha = solve_alpha(k)
    if n_hat <= alpha:
        return 1.0
    return alpha / n_hat
