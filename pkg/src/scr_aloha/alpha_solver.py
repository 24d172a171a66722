"""Optimal access parameter for K-resolution contention slots.

A contention slot resolves all transmissions when at most K users transmit and
none otherwise.  With a Poisson(g) number of transmitters the expected number
resolved per slot is E[S](g) = g * Q(K, g), where Q is the regularized upper
incomplete gamma function (equivalently the Poisson CDF at K - 1).  E[S] is
maximized at the unique alpha > 0 where the CDF mass balances the pmf at K:

    Q(K, alpha) = alpha^K exp(-alpha) / Gamma(K).

solve_alpha locates that root by bisection on [1, 2K + 2] followed by Newton
polishing of the residual r(alpha) = Q(K, alpha) - p(alpha), with
p(alpha) = exp(K ln alpha - alpha - lgamma(K)) and derivative
r'(alpha) = p(alpha) * (1 - (K + 1) / alpha).  For K = 1 the root is exactly 1
(e^{-a} = a e^{-a} forces a = 1); for K = 2 it is the golden ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .special import regularized_upper_gamma

__all__ = [
    "solve_alpha",
    "optimality_residual",
    "AlphaEntry",
    "design_table",
    "DESIGN_CSV_HEADER",
    "design_csv_lines",
    "RESIDUAL_TOL",
]

#: guaranteed bound on |Q(K, alpha) - alpha^K e^{-alpha} / Gamma(K)| at the root
RESIDUAL_TOL = 1e-10

_BISECT_TOL = 1e-6
_NEWTON_TOL = 1e-12
_NEWTON_MAX_ITER = 60


def _pmf_at_k(k: int, alpha: float) -> float:
    # alpha^K e^{-alpha} / Gamma(K), in log space so large K stays in range
    return math.exp(k * math.log(alpha) - alpha - math.lgamma(k))


def optimality_residual(k: int, alpha: float) -> float:
    """r(alpha) = Q(K, alpha) - alpha^K e^{-alpha}/Gamma(K); zero at the optimum."""
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    return regularized_upper_gamma(k, alpha) - _pmf_at_k(k, alpha)


@lru_cache(maxsize=None)
def solve_alpha(k: int) -> float:
    """Return the offered load alpha that maximizes resolved users per slot.

    Deterministic, no RNG.  The residual of the optimality condition at the
    returned value is below RESIDUAL_TOL; the solver raises rather than return
    a value that misses that guarantee.

    Raises ValueError for K < 1 or non-integer K.
    """
    if int(k) != k or k < 1:
        raise ValueError(f"K must be a positive integer, got {k!r}")
    k = int(k)
    if k == 1:
        return 1.0

    # r(1) > 0 for K >= 2 and r decreases through zero before 2K + 2
    lo, hi = 1.0, 2.0 * k + 2.0
    if optimality_residual(k, lo) < 0.0 or optimality_residual(k, hi) > 0.0:
        raise RuntimeError(f"root bracket [1, {hi}] failed for K={k}")
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if optimality_residual(k, mid) > 0.0:
            lo = mid
        else:
            hi = mid

    alpha = 0.5 * (lo + hi)
    for _ in range(_NEWTON_MAX_ITER):
        r = optimality_residual(k, alpha)
        dr = _pmf_at_k(k, alpha) * (1.0 - (k + 1.0) / alpha)
        step = r / dr
        alpha -= step
        if abs(step) < _NEWTON_TOL * alpha:
            break
    if abs(optimality_residual(k, alpha)) > RESIDUAL_TOL:
        raise RuntimeError(f"Newton polish failed to converge for K={k}")
    return alpha


@dataclass(frozen=True)
class AlphaEntry:
    """One design-table row: the optimal operating point for depth K.

    expected_s is users resolved per slot at the optimum, expected_t the same
    normalized by the slot length K, and the two probabilities split the slot
    outcomes (idle / more than K transmitters).
    """

    K: int
    alpha: float
    expected_s: float
    expected_t: float
    p_idle: float
    p_unresolvable: float


def design_table(k_max: int) -> list[AlphaEntry]:
    """Design-table rows for K = 1..k_max, sorted by K."""
    from .analytics import expected_resolved_at_load, outcome_probabilities

    if int(k_max) != k_max or k_max < 1:
        raise ValueError(f"k_max must be a positive integer, got {k_max!r}")
    rows = []
    for k in range(1, int(k_max) + 1):
        alpha = solve_alpha(k)
        e_s = expected_resolved_at_load(k, alpha)
        p_idle, _, p_unres = outcome_probabilities(k, alpha)
        rows.append(
            AlphaEntry(
                K=k,
                alpha=alpha,
                expected_s=e_s,
                expected_t=e_s / k,
                p_idle=p_idle,
                p_unresolvable=p_unres,
            )
        )
    return rows


DESIGN_CSV_HEADER = "K,alpha,E_S,E_T,P_idle,P_unresolvable"


def _sig6(x: float) -> str:
    return f"{x:.6g}"


def design_csv_lines(rows: list[AlphaEntry]) -> list[str]:
    """CSV lines (header + one row per entry, 6 significant digits)."""
    lines = [DESIGN_CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    str(r.K),
                    _sig6(r.alpha),
                    _sig6(r.expected_s),
                    _sig6(r.expected_t),
                    _sig6(r.p_idle),
                    _sig6(r.p_unresolvable),
                ]
            )
        )
    return lines
