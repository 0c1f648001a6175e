"""Weighted index sampling without replacement and probability-vector utilities.

The sampling scheme is successive sampling: draw one index proportional to
the current weights, zero it out, renormalize implicitly, repeat.  Indices
with zero weight are never drawn.
"""

import numpy as np

# Algorithm identifier recorded in model metadata so runs are reproducible.
RNG_ALGORITHM = "numpy-pcg64"

PROB_SUM_TOL = 1e-9


def make_rng(seed: int) -> np.random.Generator:
    """Seedable 64-bit generator used for all randomness in this package."""
    return np.random.Generator(np.random.PCG64(seed))


def uniform(length: int) -> np.ndarray:
    """Uniform probability vector of the given length."""
    if length < 1:
        raise ValueError("probability vector length must be >= 1")
    return np.full(length, 1.0 / length)


def check_probability_vector(probs: np.ndarray, tol: float = PROB_SUM_TOL) -> None:
    """Raise ValueError unless probs is nonnegative and sums to 1 within tol."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 1 or probs.size < 1:
        raise ValueError("probability vector must be 1-D and nonempty")
    if np.any(probs < 0):
        raise ValueError("probability vector has negative entries")
    total = probs.sum()
    if abs(total - 1.0) > tol:
        raise ValueError(f"probability vector sums to {total!r}, not 1")


def sample_without_replacement(n_draw: int, probs: np.ndarray,
                               rng: np.random.Generator) -> np.ndarray:
    """Draw n_draw distinct indices in [0, len(probs)) by successive sampling.

    Requires at least n_draw strictly positive weights.  The same rng state
    always yields the same indices.
    """
    w = np.array(probs, dtype=np.float64, copy=True)
    size = w.size
    if n_draw > size:
        raise ValueError(f"cannot draw {n_draw} indices from a population of {size}")
    n_positive = int((w > 0).sum())
    if n_positive < n_draw:
        raise ValueError(
            f"need {n_draw} strictly positive weights, found {n_positive}"
        )

    out = np.empty(n_draw, dtype=np.int64)
    for k in range(n_draw):
        cum = np.cumsum(w)
        total = cum[-1]
        if total > 0.0:
            u = rng.random() * total
            i = int(np.searchsorted(cum, u, side="right"))
        else:
            i = size
        if i >= size:
            # u rounded up to the total (or remaining mass underflowed):
            # take the last index that still has mass.
            i = int(np.flatnonzero(w > 0)[-1])
        out[k] = i
        w[i] = 0.0
    return out
