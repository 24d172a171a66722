"""Receiver-side pseudo-Bayesian backlog estimator.

The receiver approximates the backlog distribution as Poisson with mean
n_hat_t and broadcasts the access probability q_t = min{alpha / n_hat_t, 1}.
After observing the exact multiplicity c of slot t it updates

    n_hat_{t+1} = lambda_k + max{0, n_hat_t - alpha}     if 0 <= c <= K,
    n_hat_{t+1} = lambda_k + n_hat_t + c - alpha         if c > K,

where lambda_k is the expected number of new arrivals per slot.  The first
branch applies to idle slots too: c = 0 still subtracts alpha.  Both branches
keep n_hat nonnegative because alpha < K + 1 for every optimal alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

__all__ = ["EstimatorState", "init_state", "update"]


@dataclass(frozen=True)
class EstimatorState:
    """Immutable estimator state; update() returns a new value."""

    n_hat: float
    alpha: float
    lambda_k: float
    K: int
    #: access probability for the current slot, min{alpha/n_hat, 1}
    q: float

    def snapshot(self, t: int) -> dict:
        """JSON-ready snapshot of the broadcastable state at slot t."""
        return {"t": int(t), "n_hat": self.n_hat, "q": self.q}


def _access_probability(alpha: float, n_hat: float) -> float:
    # n_hat = 0 means no expected backlog; letting everyone transmit is the
    # continuous extension of the clamp
    if n_hat <= alpha:
        return 1.0
    return alpha / n_hat


def init_state(
    k: int, lam: float, alpha: float, n_hat_0: float | None = None
) -> EstimatorState:
    """Fresh estimator state for depth K and arrival rate lam per time unit.

    The per-slot arrival mean is lam * K (a slot lasts K time units).
    n_hat_0 defaults to that per-slot mean: a new receiver expects only fresh
    arrivals.  Rejects negative or non-finite inputs.
    """
    if int(k) != k or k < 1:
        raise ValueError(f"K must be a positive integer, got {k!r}")
    if not math.isfinite(lam) or lam < 0.0:
        raise ValueError(f"lam must be finite and >= 0, got {lam!r}")
    if not math.isfinite(alpha) or alpha <= 0.0:
        raise ValueError(f"alpha must be finite and > 0, got {alpha!r}")
    lambda_k = lam * k
    if n_hat_0 is None:
        n_hat_0 = lambda_k
    if not math.isfinite(n_hat_0) or n_hat_0 < 0.0:
        raise ValueError(f"n_hat_0 must be finite and >= 0, got {n_hat_0!r}")
    return EstimatorState(
        n_hat=float(n_hat_0),
        alpha=float(alpha),
        lambda_k=float(lambda_k),
        K=int(k),
        q=_access_probability(alpha, float(n_hat_0)),
    )


def update(state: EstimatorState, c_observed: int) -> EstimatorState:
    """Advance the estimate given the slot's exact multiplicity."""
    if int(c_observed) != c_observed or c_observed < 0:
        raise ValueError(
            f"c_observed must be a nonnegative integer, got {c_observed!r}"
        )
    c = int(c_observed)
    if c <= state.K:
        n_hat = state.lambda_k + max(0.0, state.n_hat - state.alpha)
    else:
        n_hat = state.lambda_k + state.n_hat + c - state.alpha
    return replace(state, n_hat=n_hat, q=_access_probability(state.alpha, n_hat))
