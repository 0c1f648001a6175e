"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the two hot kernels (split search during tree fitting, batch tree
traversal) and an end-to-end training run, with each backend swapped in.

    python3 benchmarks/bench_backends.py [--trees 300] [--rows 2000] [--cols 100]
"""

import argparse
import time

import numpy as np

from mpboost import _backend
from mpboost._backend import _pykernels
from mpboost.boost import default_hyperparams, train
from mpboost.dataset import generate_cones, train_test_split
from mpboost.sampler import make_rng
from mpboost.tree import apply_tree, fit_tree

try:
    from mpboost._backend import _ckernels
except ImportError:
    _ckernels = None


def bench_fit(rng, trees, patch_rows, patch_cols):
    patches = [
        (rng.standard_normal((patch_rows, patch_cols)),
         np.where(rng.random(patch_rows) < 0.5, 1, -1))
        for _ in range(trees)
    ]
    started = time.perf_counter()
    fitted = [fit_tree(X, y) for X, y in patches]
    return time.perf_counter() - started, fitted


def bench_apply(rng, fitted, rows, patch_cols):
    X = rng.standard_normal((rows, patch_cols))
    started = time.perf_counter()
    for tree in fitted:
        apply_tree(tree, X)
    return time.perf_counter() - started


def bench_train(rows, cols):
    data = generate_cones(rows, 10, cols - 10, seed=0)
    tr, te = train_test_split(data, 0.2, seed=0)
    hp = default_hyperparams(tr.n_rows, tr.n_cols, seed=0)
    started = time.perf_counter()
    model, _ = train(tr, hp, test_data=te)
    return time.perf_counter() - started, len(model.learners)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trees", type=int, default=300)
    parser.add_argument("--rows", type=int, default=2000)
    parser.add_argument("--cols", type=int, default=100)
    parser.add_argument("--patch-rows", type=int, default=200)
    parser.add_argument("--patch-cols", type=int, default=10)
    args = parser.parse_args()

    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled kernels not built; timing the fallback only")

    results = {}
    saved = (_backend.best_split, _backend.apply_tree)
    try:
        for name, module in backends:
            _backend.best_split = module.best_split
            _backend.apply_tree = module.apply_tree
            rng = make_rng(42)
            fit_s, fitted = bench_fit(rng, args.trees, args.patch_rows, args.patch_cols)
            apply_s = bench_apply(rng, fitted, args.rows, args.patch_cols)
            train_s, iters = bench_train(args.rows, args.cols)
            results[name] = (fit_s, apply_s, train_s)
            print(f"{name:>7}: fit {args.trees} trees ({args.patch_rows}x{args.patch_cols}) "
                  f"{fit_s:7.3f}s | apply to {args.rows} rows {apply_s:7.3f}s | "
                  f"end-to-end train ({iters} iterations) {train_s:7.3f}s")
    finally:
        _backend.best_split, _backend.apply_tree = saved

    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        print(f"speedup: fit {py[0] / cy[0]:.1f}x | apply {py[1] / cy[1]:.1f}x | "
              f"train {py[2] / cy[2]:.1f}x")


if __name__ == "__main__":
    main()
