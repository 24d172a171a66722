"""Unit tests for the pseudo-Bayesian backlog estimator."""

import json

import numpy as np
import pytest

from scr_aloha.alpha_solver import solve_alpha
from scr_aloha.estimator import EstimatorState, init_state, update


class TestInitState:
    def test_small_backlog_clamps_q(self):
        state = init_state(1, 0.3, 1.0, 1.0)
        assert state.q == 1.0

    def test_direct_division(self):
        state = init_state(2, 0.2, 1.61803, 10.0)
        assert state.q == 1.61803 / 10.0
        assert state.lambda_k == 0.4

    def test_empty_start(self):
        state = init_state(1, 0.0, 1.0, 0.0)
        assert state.q == 1.0
        assert state.n_hat == 0.0

    def test_default_initial_estimate_is_per_slot_arrivals(self):
        state = init_state(3, 0.2, solve_alpha(3))
        assert state.n_hat == 0.2 * 3

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            init_state(0, 0.1, 1.0)
        with pytest.raises(ValueError):
            init_state(1, -0.1, 1.0)
        with pytest.raises(ValueError):
            init_state(1, 0.1, 0.0)
        with pytest.raises(ValueError):
            init_state(1, 0.1, 1.0, -2.0)
        with pytest.raises(ValueError):
            init_state(1, float("inf"), 1.0)


class TestUpdate:
    def test_resolved_branch_exact(self):
        state = init_state(1, 0.3, 1.0, 10.0)
        assert update(state, 1).n_hat == 9.3

    def test_collision_branch_exact(self):
        state = init_state(1, 0.3, 1.0, 10.0)
        assert update(state, 4).n_hat == 13.3

    def test_idle_slot_clamps_at_zero(self):
        state = init_state(2, 0.2, 1.61803, 0.5)
        assert update(state, 0).n_hat == 0.4

    def test_both_branches_exhaustively(self):
        # reproduce the two-branch rule verbatim for every c up to 3K
        for k in range(1, 7):
            alpha = solve_alpha(k)
            state = init_state(k, 0.3, alpha, 7.0)
            for c in range(0, 3 * k + 1):
                new = update(state, c)
                if c <= k:
                    expected = state.lambda_k + max(0.0, state.n_hat - alpha)
                else:
                    expected = state.lambda_k + state.n_hat + c - alpha
                assert new.n_hat == expected, f"K={k}, c={c}"

    def test_q_recomputed_after_update(self):
        state = init_state(2, 0.4, 1.61803, 30.0)
        for c in [0, 1, 2, 5, 9]:
            new = update(state, c)
            expected_q = 1.0 if new.n_hat <= new.alpha else new.alpha / new.n_hat
            assert new.q == expected_q

    def test_estimate_never_negative(self):
        rng = np.random.default_rng(314)
        for k in range(1, 7):
            state = init_state(k, 0.05, solve_alpha(k), 0.0)
            for c in rng.integers(0, 4 * k, size=5000):
                state = update(state, int(c))
                assert state.n_hat >= 0.0

    def test_returns_new_value(self):
        state = init_state(1, 0.3, 1.0, 10.0)
        new = update(state, 1)
        assert new is not state
        assert state.n_hat == 10.0
        with pytest.raises(Exception):
            state.n_hat = 5.0

    def test_rejects_bad_multiplicity(self):
        state = init_state(1, 0.3, 1.0, 10.0)
        with pytest.raises(ValueError):
            update(state, -1)
        with pytest.raises(ValueError):
            update(state, 1.5)


class TestSnapshot:
    def test_fields_and_serializability(self):
        state = init_state(2, 0.2, 1.61803, 10.0)
        snap = state.snapshot(17)
        assert set(snap) == {"t", "n_hat", "q"}
        assert snap["t"] == 17
        assert snap["n_hat"] == 10.0
        assert snap["q"] == state.q
        assert json.loads(json.dumps(snap)) == snap


class TestStateValue:
    def test_equality_semantics(self):
        a = init_state(1, 0.3, 1.0, 10.0)
        b = init_state(1, 0.3, 1.0, 10.0)
        assert a == b
        assert update(a, 1) == update(b, 1)

    def test_is_dataclass_value(self):
        state = init_state(1, 0.3, 1.0, 10.0)
        assert isinstance(state, EstimatorState)
        assert state.K == 1
        assert state.alpha == 1.0
