"""Tests for the out-of-patch stopping rule.

The frozen halt iterations and best iterations below were hand-traced
through the rule's literal step order (best-iteration check, halt check,
stall counter, top-k update) with N=100 rows and 10-row patches, i.e.
growth factor 1 + ln(10)/100 and window k = 5.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpboost.stopping import StoppingState


def run_sequence(seq, n_rows=100, patch_rows=10, t_max=2000):
    """Feed a sequence to observe(); return (halt_t or None, best_iteration)."""
    state = StoppingState(n_rows=n_rows, patch_rows=patch_rows, t_max=t_max)
    for t, oop in enumerate(seq, start=1):
        if state.observe(oop, t):
            return t, state.best_iteration
    return None, state.best_iteration


class TestConstruction:
    def test_constants_from_shape(self):
        state = StoppingState(n_rows=100, patch_rows=10, t_max=2000)
        assert math.isclose(state.gamma, 1.0 + math.log(10) / 100)
        assert round(state.gamma, 5) == 1.02303
        assert state.k == 5
        assert state.top.shape == (5,)
        assert (state.top == 0).all()

    def test_window_at_least_one(self):
        assert StoppingState(n_rows=2, patch_rows=1, t_max=10).k == 1

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            StoppingState(n_rows=0, patch_rows=1, t_max=10)
        with pytest.raises(ValueError):
            StoppingState(n_rows=10, patch_rows=1, t_max=0)


class TestHandTraces:
    def test_constant_sequence(self):
        # 0.8 forever: the window fills over t=1..5, the stall counter then
        # rises by one per call (0.8 < gamma*0.8), passes k=5 at t=11, and
        # the halt check sees v=6 at t=12.
        halt, best = run_sequence([0.8] * 20)
        assert halt == 12
        assert best == 1

    def test_strictly_increasing_never_halts(self):
        seq = [0.10 * 1.05**i for i in range(20)]
        halt, best = run_sequence(seq)
        assert halt is None
        assert best == 20

    def test_single_peak(self):
        seq = [0.2, 0.4, 0.6, 0.8, 0.9, 0.7, 0.6, 0.5, 0.4, 0.3, 0.3, 0.3, 0.3, 0.3]
        halt, best = run_sequence(seq)
        assert halt == 14
        assert best == 5

    def test_plateau_then_rise_resets_the_stall_counter(self):
        seq = [0.5] * 8 + [0.9] * 14
        halt, best = run_sequence(seq)
        assert halt == 20
        assert best == 9

    def test_noisy_plateau(self):
        seq = [0.80, 0.81, 0.79, 0.80, 0.81, 0.80, 0.82,
               0.79, 0.80, 0.81, 0.80, 0.79, 0.78, 0.80]
        halt, best = run_sequence(seq)
        assert halt == 14
        assert best == 7


class TestMechanics:
    def test_t_max_forces_halt(self):
        # a sequence that never stalls still halts right after t_max
        seq = [0.10 * 1.05**i for i in range(30)]
        halt, best = run_sequence(seq, t_max=25)
        assert halt == 26

    def test_out_of_order_calls_rejected(self):
        state = StoppingState(n_rows=100, patch_rows=10, t_max=100)
        state.observe(0.5, 1)
        with pytest.raises(ValueError, match="out-of-order"):
            state.observe(0.5, 3)

    def test_tie_with_running_max_does_not_move_best(self):
        state = StoppingState(n_rows=100, patch_rows=10, t_max=100)
        state.observe(0.7, 1)
        state.observe(0.7, 2)
        assert state.best_iteration == 1

    def test_top_window_extremes_non_decreasing(self):
        rng = np.random.default_rng(3)
        state = StoppingState(n_rows=100, patch_rows=10, t_max=10_000)
        prev_min, prev_max = 0.0, 0.0
        for t, oop in enumerate(rng.random(500), start=1):
            if state.observe(float(oop), t):
                break
            assert state.top.min() >= prev_min
            assert state.top.max() >= prev_max
            prev_min, prev_max = state.top.min(), state.top.max()

    def test_constant_sequence_halts_within_window_after_saturation(self):
        # once the window holds the constant, at most k+2 further calls run
        state = StoppingState(n_rows=100, patch_rows=10, t_max=10_000)
        t = 0
        for _ in range(state.k):
            t += 1
            assert not state.observe(0.6, t)
        for extra in range(state.k + 2):
            t += 1
            if state.observe(0.6, t):
                break
        else:
            pytest.fail("constant sequence did not halt after saturating the window")

    @given(
        seq=st.lists(
            st.floats(1e-6, 1.0, allow_nan=False, allow_infinity=False),
            min_size=1,
            max_size=200,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_best_iteration_is_first_occurrence_argmax(self, seq):
        state = StoppingState(n_rows=100, patch_rows=10, t_max=10**9)
        seen = []
        for t, oop in enumerate(seq, start=1):
            seen.append(oop)
            if state.observe(oop, t):
                break
        expected = int(np.argmax(seen)) + 1
        assert state.best_iteration == expected
