"""Seeded closed-loop simulator of the K-resolution random-access protocol.

Each slot t (length K time units): A_t ~ Poisson(lam*K) new users arrive and
join the backlog at the next slot; each of the N_t currently backlogged users
transmits independently with probability q_t, so the multiplicity is one
Binomial(N_t, q_t) draw (the infinite-population equivalence: users are
anonymous counters, no per-user state).  The slot resolves all C_t
transmissions when C_t <= K and none otherwise, and the receiver learns C_t
exactly either way:

    N_{t+1} = A_t + N_t - S_t,   S_t = C_t if C_t <= K else 0.

The pseudo-Bayesian estimator runs in the loop and supplies q_t under the
default policy; fixed_q and genie policies override q_t but the estimator is
still updated each slot as a shadow diagnostic.

RNG is numpy's Philox counter-based generator.  Arrivals for the whole
horizon are drawn as one block up front; per-slot contention draws follow in
slot order.  Identical (config, seed) therefore reproduces a bit-identical
trace.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import stats

from .alpha_solver import solve_alpha
from .estimator import EstimatorState, init_state, update

__all__ = [
    "SimConfig",
    "SimConfigError",
    "SimulationOverflowError",
    "SlotOutcome",
    "SimTrace",
    "SweepPoint",
    "run_simulation",
    "run_saturation",
    "sweep_lambda",
    "detect_drift",
    "load_config",
    "config_to_dict",
    "write_trace_csv",
    "read_trace_csv",
    "replay_ok",
    "TRACE_CSV_HEADER",
]

_POLICIES = ("pseudo_bayesian", "fixed_q", "genie")

#: backlog beyond this aborts the run (unstable beyond any useful horizon)
_BACKLOG_LIMIT = 2**63


class SimConfigError(ValueError):
    """Malformed simulation config; carries the offending field name."""

    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(f"config field '{field_name}': {message}")


@dataclass(frozen=True)
class SimConfig:
    """Closed-loop run parameters.

    lam is the arrival rate per time unit, so the per-slot arrival mean is
    lam * K.  The JSON key for lam is "lambda" (reserved word in Python).
    q_policy selects who sets the access probability: the estimator
    ("pseudo_bayesian"), a constant ("fixed_q", requires q_fixed), or the
    true backlog ("genie", q_t = min{alpha/N_t, 1}).
    """

    K: int
    lam: float
    horizon_slots: int
    seed: int
    n0: int = 0
    alpha_override: float | None = None
    q_policy: str = "pseudo_bayesian"
    q_fixed: float | None = None

    def __post_init__(self) -> None:
        if int(self.K) != self.K or self.K < 1:
            raise SimConfigError("K", f"must be a positive integer, got {self.K!r}")
        if not math.isfinite(self.lam) or self.lam < 0.0:
            raise SimConfigError("lambda", f"must be finite and >= 0, got {self.lam!r}")
        if int(self.horizon_slots) != self.horizon_slots or self.horizon_slots < 1:
            raise SimConfigError(
                "horizon_slots", f"must be a positive integer, got {self.horizon_slots!r}"
            )
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise SimConfigError("seed", f"must be a 64-bit integer, got {self.seed!r}")
        if int(self.n0) != self.n0 or self.n0 < 0:
            raise SimConfigError("n0", f"must be a nonnegative integer, got {self.n0!r}")
        if self.alpha_override is not None and not (
            math.isfinite(self.alpha_override) and self.alpha_override > 0.0
        ):
            raise SimConfigError(
                "alpha_override", f"must be finite and > 0, got {self.alpha_override!r}"
            )
        if self.q_policy not in _POLICIES:
            raise SimConfigError(
                "q_policy", f"must be one of {_POLICIES}, got {self.q_policy!r}"
            )
        if self.q_policy == "fixed_q":
            if self.q_fixed is None or not 0.0 <= self.q_fixed <= 1.0:
                raise SimConfigError(
                    "q_fixed", f"fixed_q policy needs q_fixed in [0, 1], got {self.q_fixed!r}"
                )
        elif self.q_fixed is not None:
            raise SimConfigError(
                "q_fixed", f"only valid with q_policy=fixed_q, got {self.q_fixed!r}"
            )

    @property
    def alpha(self) -> float:
        return self.alpha_override if self.alpha_override is not None else solve_alpha(self.K)


_CONFIG_KEYS = {
    "K": "K",
    "lambda": "lam",
    "horizon_slots": "horizon_slots",
    "seed": "seed",
    "n0": "n0",
    "alpha_override": "alpha_override",
    "q_policy": "q_policy",
    "q_fixed": "q_fixed",
}


def load_config(source: dict | str, default_seed: int | None = None) -> SimConfig:
    """Build a SimConfig from a JSON file path or an already-parsed dict.

    JSON keys mirror the dataclass fields with "lambda" for lam.  Unknown
    keys and missing required fields raise SimConfigError naming the field.
    A missing "seed" falls back to default_seed when given.
    """
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SimConfigError("<file>", f"not valid JSON: {exc}") from exc
    else:
        raw = source
    if not isinstance(raw, dict):
        raise SimConfigError("<file>", "top level must be a JSON object")
    for key in raw:
        if key not in _CONFIG_KEYS:
            raise SimConfigError(key, "unknown field")
    kwargs = {}
    for json_key, attr in _CONFIG_KEYS.items():
        if json_key in raw:
            kwargs[attr] = raw[json_key]
    if "seed" not in kwargs:
        if default_seed is None:
            raise SimConfigError("seed", "required field missing")
        kwargs["seed"] = default_seed
    for required in ("K", "lam", "horizon_slots"):
        if required not in kwargs:
            json_name = "lambda" if required == "lam" else required
            raise SimConfigError(json_name, "required field missing")
    for attr in ("K", "horizon_slots", "seed", "n0"):
        if attr in kwargs and isinstance(kwargs[attr], bool):
            raise SimConfigError(attr, "must be an integer, got a boolean")
        if attr in kwargs and not isinstance(kwargs[attr], int):
            raise SimConfigError(attr, f"must be an integer, got {kwargs[attr]!r}")
    for attr, json_name in (("lam", "lambda"), ("alpha_override", "alpha_override"), ("q_fixed", "q_fixed")):
        if attr in kwargs and kwargs[attr] is not None and not isinstance(kwargs[attr], (int, float)):
            raise SimConfigError(json_name, f"must be a number, got {kwargs[attr]!r}")
    return SimConfig(**kwargs)


def config_to_dict(config: SimConfig) -> dict:
    """Inverse of load_config: JSON-ready dict with the "lambda" key."""
    out = {
        "K": config.K,
        "lambda": config.lam,
        "horizon_slots": config.horizon_slots,
        "seed": config.seed,
        "n0": config.n0,
        "q_policy": config.q_policy,
    }
    if config.alpha_override is not None:
        out["alpha_override"] = config.alpha_override
    if config.q_fixed is not None:
        out["q_fixed"] = config.q_fixed
    return out


def _classify(attempted: int, k: int) -> str:
    if attempted == 0:
        return "idle"
    if attempted <= k:
        return "resolved"
    return "unresolvable"


@dataclass(frozen=True)
class SlotOutcome:
    """What one slot produced."""

    t: int
    arrivals: int
    attempted: int
    resolved: int
    outcome_class: str


@dataclass
class SimTrace:
    """Per-slot time series of one run plus derived summaries.

    Arrays all have one entry per simulated slot: N and n_hat are the true
    and estimated backlog at the slot start, q the access probability in
    effect, A/C/S the arrivals, attempted and resolved counts of the slot.
    final_backlog and final_n_hat are the post-horizon states.  truncated
    marks a run aborted by the backlog overflow guard.
    """

    config: SimConfig
    N: np.ndarray
    n_hat: np.ndarray
    q: np.ndarray
    A: np.ndarray
    C: np.ndarray
    S: np.ndarray
    final_backlog: int
    final_n_hat: float
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.N)

    def slot(self, t: int) -> SlotOutcome:
        return SlotOutcome(
            t=t,
            arrivals=int(self.A[t]),
            attempted=int(self.C[t]),
            resolved=int(self.S[t]),
            outcome_class=_classify(int(self.C[t]), self.config.K),
        )

    def outcomes(self) -> Iterator[SlotOutcome]:
        for t in range(len(self)):
            yield self.slot(t)

    def conservation_ok(self) -> bool:
        """Total arrivals = total resolved + final backlog - initial backlog."""
        # object-dtype sum: arrival counts near 2^63 would wrap an int64 sum
        total_arrivals = int(self.A.sum(dtype=object)) if len(self.A) else 0
        return total_arrivals == int(self.S.sum()) + self.final_backlog - self.config.n0

    def summary(self) -> dict:
        """JSON-ready run summary (full float precision)."""
        t_slots = len(self)
        total_resolved = int(self.S.sum())
        k = self.config.K
        counts = {"idle": 0, "resolved": 0, "unresolvable": 0}
        c = np.asarray(self.C)
        counts["idle"] = int((c == 0).sum())
        counts["unresolvable"] = int((c > k).sum())
        counts["resolved"] = t_slots - counts["idle"] - counts["unresolvable"]
        slope, p_value = detect_drift(self.N)
        return {
            "config": config_to_dict(self.config),
            "slots": t_slots,
            "truncated": self.truncated,
            "total_arrivals": int(self.A.sum(dtype=object)) if t_slots else 0,
            "total_resolved": total_resolved,
            "initial_backlog": self.config.n0,
            "final_backlog": self.final_backlog,
            "final_n_hat": self.final_n_hat,
            "conservation_ok": self.conservation_ok(),
            "resolved_per_slot": total_resolved / t_slots,
            "resolved_per_second": total_resolved / (t_slots * k),
            "outcome_counts": counts,
            "outcome_frequencies": {
                name: counts[name] / t_slots for name in counts
            },
            "mean_backlog": float(np.mean(self.N)),
            "max_backlog": int(np.max(self.N)),
            "mean_abs_estimate_error": float(np.mean(np.abs(self.n_hat - self.N))),
            "drift_slope_per_batch": slope,
            "drift_p_value": p_value,
            "drift_detected": bool(p_value < 0.01),
        }


class SimulationOverflowError(RuntimeError):
    """Backlog reached 2^63; the partial trace is attached."""

    def __init__(self, trace: SimTrace):
        self.trace = trace
        super().__init__(
            f"backlog reached {_BACKLOG_LIMIT} at slot {len(trace) - 1}; "
            "run aborted with partial trace"
        )


def run_simulation(config: SimConfig) -> SimTrace:
    """Run the closed loop for config.horizon_slots slots.

    Deterministic given (config, seed).  Raises SimulationOverflowError with
    the partial trace if the backlog reaches 2^63.
    """
    k = config.K
    horizon = config.horizon_slots
    alpha = config.alpha
    rng = np.random.Generator(np.random.Philox(config.seed))

    arrivals = rng.poisson(config.lam * k, size=horizon)
    n_arr = np.zeros(horizon, dtype=np.int64)
    nhat_arr = np.zeros(horizon, dtype=np.float64)
    q_arr = np.zeros(horizon, dtype=np.float64)
    c_arr = np.zeros(horizon, dtype=np.int64)
    s_arr = np.zeros(horizon, dtype=np.int64)

    est: EstimatorState = init_state(k, config.lam, alpha)
    backlog = int(config.n0)

    for t in range(horizon):
        if config.q_policy == "pseudo_bayesian":
            q_t = est.q
        elif config.q_policy == "fixed_q":
            q_t = float(config.q_fixed)
        else:
            q_t = 1.0 if backlog <= alpha else alpha / backlog
        a_t = int(arrivals[t])
        c_t = int(rng.binomial(backlog, q_t))
        s_t = c_t if c_t <= k else 0

        n_arr[t] = backlog
        nhat_arr[t] = est.n_hat
        q_arr[t] = q_t
        c_arr[t] = c_t
        s_arr[t] = s_t

        est = update(est, c_t)
        backlog = backlog + a_t - s_t
        # at exactly 2^63 the value no longer fits the int64 trace arrays
        if backlog >= _BACKLOG_LIMIT:
            trace = SimTrace(
                config=config,
                N=n_arr[: t + 1],
                n_hat=nhat_arr[: t + 1],
                q=q_arr[: t + 1],
                A=arrivals[: t + 1].astype(np.int64),
                C=c_arr[: t + 1],
                S=s_arr[: t + 1],
                final_backlog=backlog,
                final_n_hat=est.n_hat,
                truncated=True,
            )
            raise SimulationOverflowError(trace)

    return SimTrace(
        config=config,
        N=n_arr,
        n_hat=nhat_arr,
        q=q_arr,
        A=arrivals.astype(np.int64),
        C=c_arr,
        S=s_arr,
        final_backlog=backlog,
        final_n_hat=est.n_hat,
    )


def run_saturation(
    k: int, n_fixed: int, q: float, trials: int, seed: int
) -> tuple[float, float]:
    """Open-loop Monte-Carlo estimate of resolved users per slot.

    Each trial draws a fresh backlog N ~ Poisson(n_fixed), thins it with q,
    and scores C when C <= K, else 0.  Returns (mean, standard error).
    """
    if int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q!r}")
    trials = int(trials)
    rng = np.random.Generator(np.random.Philox(seed))
    n = rng.poisson(float(n_fixed), size=trials)
    c = rng.binomial(n, q)
    s = np.where(c <= k, c, 0)
    mean = float(s.mean())
    if trials == 1:
        return mean, 0.0
    return mean, float(s.std(ddof=1) / math.sqrt(trials))


def detect_drift(backlog: np.ndarray, batches: int = 50) -> tuple[float, float]:
    """One-sided test for positive backlog drift over the last half of a run.

    The last half is split into contiguous batches; an OLS line through the
    batch means absorbs the slot-to-slot autocorrelation that would make a
    per-slot regression wildly overconfident.  Returns (slope per batch,
    one-sided p-value for slope > 0); small p means drift.
    """
    x = np.asarray(backlog, dtype=np.float64)
    half = x[len(x) // 2 :]
    nb = min(int(batches), len(half))
    if nb < 3:
        return 0.0, 1.0
    usable = (len(half) // nb) * nb
    means = half[:usable].reshape(nb, -1).mean(axis=1)
    idx = np.arange(nb, dtype=np.float64)
    xc = idx - idx.mean()
    yc = means - means.mean()
    sxx = float((xc**2).sum())
    slope = float((xc * yc).sum() / sxx)
    resid = yc - slope * xc
    dof = nb - 2
    s2 = float((resid**2).sum()) / dof
    se = math.sqrt(s2 / sxx)
    if se == 0.0:
        # perfectly linear batch means: flat is no drift, any rise is drift
        return slope, 0.5 if slope == 0.0 else (0.0 if slope > 0.0 else 1.0)
    t_stat = slope / se
    p_value = float(stats.t.sf(t_stat, dof))
    return slope, p_value


@dataclass(frozen=True)
class SweepPoint:
    """Closed-loop operating point measured by sweep_lambda."""

    lam: float
    mean_backlog: float
    throughput_per_second: float
    fraction_unresolvable: float
    resolved_per_slot: float
    drift_detected: bool
    drift_p_value: float
    truncated: bool = False


def sweep_lambda(
    k: int, lambdas: list[float], horizon: int, seed: int
) -> list[SweepPoint]:
    """One pseudo-Bayesian closed-loop run per arrival rate.

    Per-run seeds are spawned deterministically from the master seed.  A run
    whose backlog shows positive drift (batch-means slope test, p < 0.01) is
    flagged drift_detected; a run aborted by the overflow guard is summarized
    from its partial trace and flagged both truncated and drifting.
    """
    child_seeds = np.random.SeedSequence(seed).generate_state(len(lambdas), dtype=np.uint64)
    points = []
    for lam, child in zip(lambdas, child_seeds):
        config = SimConfig(K=k, lam=float(lam), horizon_slots=horizon, seed=int(child))
        try:
            trace = run_simulation(config)
            truncated = False
        except SimulationOverflowError as exc:
            trace = exc.trace
            truncated = True
        t_slots = len(trace)
        slope, p_value = detect_drift(trace.N)
        drift = truncated or p_value < 0.01
        points.append(
            SweepPoint(
                lam=float(lam),
                mean_backlog=float(np.mean(trace.N)),
                throughput_per_second=float(trace.S.sum() / (t_slots * k)),
                fraction_unresolvable=float((trace.C > k).sum() / t_slots),
                resolved_per_slot=float(trace.S.sum() / t_slots),
                drift_detected=drift,
                drift_p_value=float(p_value) if not truncated else 0.0,
                truncated=truncated,
            )
        )
    return points


TRACE_CSV_HEADER = "t,N,n_hat,q,A,C,S,outcome"


def write_trace_csv(trace: SimTrace, path: str, comments: list[str] | None = None) -> None:
    """Write the per-slot trace; floats at 6 significant digits.

    comments become leading '#' metadata lines.  The integer columns plus n0
    are sufficient to replay the whole backlog evolution exactly.
    """
    lines = []
    for comment in comments or []:
        lines.append(f"# {comment}")
    lines.append(TRACE_CSV_HEADER)
    k = trace.config.K
    for t in range(len(trace)):
        lines.append(
            ",".join(
                [
                    str(t),
                    str(int(trace.N[t])),
                    f"{trace.n_hat[t]:.6g}",
                    f"{trace.q[t]:.6g}",
                    str(int(trace.A[t])),
                    str(int(trace.C[t])),
                    str(int(trace.S[t])),
                    _classify(int(trace.C[t]), k),
                ]
            )
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trace_csv(path: str) -> dict:
    """Read a trace CSV back into columns; '#' comment lines are skipped.

    Returns a dict with integer arrays t,N,A,C,S, float arrays n_hat,q, and
    the outcome string list.
    """
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = None
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line
                if header != TRACE_CSV_HEADER:
                    raise ValueError(f"unexpected trace header {header!r}")
                continue
            rows.append(line.split(","))
    cols = list(zip(*rows)) if rows else [[] for _ in range(8)]
    return {
        "t": np.array([int(v) for v in cols[0]], dtype=np.int64),
        "N": np.array([int(v) for v in cols[1]], dtype=np.int64),
        "n_hat": np.array([float(v) for v in cols[2]], dtype=np.float64),
        "q": np.array([float(v) for v in cols[3]], dtype=np.float64),
        "A": np.array([int(v) for v in cols[4]], dtype=np.int64),
        "C": np.array([int(v) for v in cols[5]], dtype=np.int64),
        "S": np.array([int(v) for v in cols[6]], dtype=np.int64),
        "outcome": [v for v in cols[7]],
    }


def replay_ok(columns: dict, k: int, n0: int, final_backlog: int) -> bool:
    """Replay the integer recurrence from a loaded trace and check it.

    Verifies S and the outcome class against C, the backlog evolution
    N_{t+1} = A_t + N_t - S_t, and the conservation identity
    sum(A) = sum(S) + final_backlog - n0.
    """
    n = int(n0)
    for t in range(len(columns["t"])):
        if int(columns["N"][t]) != n:
            return False
        c = int(columns["C"][t])
        s = c if c <= k else 0
        if int(columns["S"][t]) != s:
            return False
        if columns["outcome"][t] != _classify(c, k):
            return False
        n = n + int(columns["A"][t]) - s
    if n != final_backlog:
        return False
    # object-dtype sum: arrival counts near 2^63 would wrap an int64 sum
    total_a = int(columns["A"].sum(dtype=object)) if len(columns["A"]) else 0
    total_s = int(columns["S"].sum())
    return total_a == total_s + final_backlog - int(n0)
