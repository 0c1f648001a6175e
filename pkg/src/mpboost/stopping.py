"""Automatic stopping for the training loop.

Tracks the k largest out-of-patch accuracies seen so far and halts after a
run of iterations that fail to improve on their minimum by a small growth
factor.  Both constants derive from the data shape at construction:
growth factor 1 + ln(patch_rows)/n_rows, window k = ceil(ln(n_rows)).

observe() executes its steps in a fixed order (best-iteration check, halt
check, stall counter, top-k update); reordering shifts the halt by one
iteration, so the order here is normative.
"""

import math

import numpy as np


class StoppingState:
    """Per-run stopping tracker; call observe(oop, t) once per iteration."""

    def __init__(self, n_rows: int, patch_rows: int, t_max: int):
        if n_rows < 1 or patch_rows < 1:
            raise ValueError("n_rows and patch_rows must be >= 1")
        if t_max < 1:
            raise ValueError("t_max must be >= 1")
        self.gamma = 1.0 + math.log(patch_rows) / n_rows
        self.k = max(1, math.ceil(math.log(n_rows)))
        self.t_max = t_max
        self.v = 0                       # consecutive non-improving iterations
        self.top = np.zeros(self.k)      # k largest oop values seen
        self.best_iteration = 0          # 0 until some oop beats the initial zeros
        self.last_t = 0

    def observe(self, oop_t: float, t: int) -> bool:
        """Consume one oop value; return True when training must halt."""
        if t != self.last_t + 1:
            raise ValueError(f"out-of-order call: expected t={self.last_t + 1}, got {t}")
        self.last_t = t

        if oop_t > self.top.max():
            self.best_iteration = t
        if self.v > self.k or t > self.t_max:
            return True
        if oop_t < self.gamma * self.top.min():
            self.v += 1
        else:
            self.v = 0
        if oop_t > self.top.min():
            self.top[self.top.argmin()] = oop_t
        return False
