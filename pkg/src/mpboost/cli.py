"""Command-line front end: train, predict, evaluate, ablate.

Exit codes: 0 success, 2 usage error, 3 data error, 4 model-format error.
All randomness derives from --seed; identical flags give byte-identical
output files.
"""

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from .boost import (
    Hyperparams,
    default_hyperparams,
    predict_many,
    predict_margin_many,
    train,
)
from .dataset import (
    Dataset,
    DatasetError,
    generate_cones,
    load_csv,
    load_features_csv,
    train_test_split,
)
from .model_io import ModelFormatError, load_model, save_model

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_MODEL = 4

ABLATION_ARMS = (
    ("both", True, True),
    ("rows", True, False),
    ("cols", False, True),
    ("neither", False, False),
)


def _fmt(value: float) -> str:
    return repr(float(value))


def _add_data_flags(parser, labeled=True):
    parser.add_argument("--data", help="CSV dataset path")
    if labeled:
        parser.add_argument("--label-col", default="label",
                            help="label column name or zero-based index")
        parser.add_argument("--positive-label", default="1",
                            help="label value mapped to +1")
    parser.add_argument("--cones", action="store_true",
                        help="generate the synthetic two-cones dataset instead of reading --data")
    parser.add_argument("--cones-samples", type=int, default=2500)
    parser.add_argument("--cones-informative", type=int, default=10)
    parser.add_argument("--cones-noise", type=int, default=90)
    parser.add_argument("--cones-margin", type=float, default=0.3)


def _add_train_flags(parser):
    parser.add_argument("--test-frac", type=float, default=0.2,
                        help="held-out fraction for curve export (0 disables the split)")
    parser.add_argument("--n-obs", type=int, help="minipatch rows (default: 10%% of N)")
    parser.add_argument("--m-feat", type=int, help="minipatch columns (default: 10%% of M)")
    parser.add_argument("--momentum", type=float, default=0.5)
    parser.add_argument("--loss", default="soft-logistic",
                        choices=["soft-exponential", "soft-logistic",
                                 "hard-exponential", "hard-logistic"])
    depth = parser.add_mutually_exclusive_group()
    depth.add_argument("--max-depth", type=int, help="depth-limited trees")
    depth.add_argument("--saturated", action="store_true",
                       help="grow trees until leaves are pure (default)")
    parser.add_argument("--t-max", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--adaptive-rows", choices=["on", "off"], default="on")
    parser.add_argument("--adaptive-cols", choices=["on", "off"], default="on")
    parser.add_argument("--importance", choices=["impurity", "permutation"],
                        default="impurity")
    parser.add_argument("--early-stop", choices=["on", "off"], default="on",
                        help="off trains to --t-max while still recording the best iteration")


def _load_dataset(args, labeled=True) -> Dataset:
    if args.cones:
        return generate_cones(
            args.cones_samples,
            args.cones_informative,
            args.cones_noise,
            margin=args.cones_margin,
            seed=args.seed if hasattr(args, "seed") else 0,
        )
    if not args.data:
        raise ValueError("either --data or --cones is required")
    if labeled:
        return load_csv(args.data, args.label_col, args.positive_label)
    raise ValueError("--data is required")


def _hyperparams(args, data: Dataset) -> Hyperparams:
    hp = default_hyperparams(data.n_rows, data.n_cols)
    return Hyperparams(
        n=args.n_obs if args.n_obs is not None else hp.n,
        m=args.m_feat if args.m_feat is not None else hp.m,
        mu=args.momentum,
        loss_kind=args.loss,
        depth_limit=args.max_depth,  # None unless --max-depth given
        t_max=args.t_max,
        adaptive_rows=args.adaptive_rows == "on",
        adaptive_cols=args.adaptive_cols == "on",
        importance_backend=args.importance,
        seed=args.seed,
    )


def write_curves_csv(path, diagnostics) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "train_acc", "oop", "test_acc"])
        for i, t in enumerate(diagnostics.iterations):
            test = (
                _fmt(diagnostics.test_accuracy[i])
                if diagnostics.test_accuracy is not None
                else ""
            )
            writer.writerow(
                [int(t), _fmt(diagnostics.train_accuracy[i]), _fmt(diagnostics.oop[i]), test]
            )


def write_p_csv(path, p) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["index", "probability"])
        for i, value in enumerate(p):
            writer.writerow([i, _fmt(value)])


def write_q_csv(path, q, feature_names=None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["feature", "probability"])
        for j, value in enumerate(q):
            name = feature_names[j] if feature_names else j
            writer.writerow([name, _fmt(value)])


def cmd_train(args) -> int:
    data = _load_dataset(args)
    if args.test_frac:
        train_data, test_data = train_test_split(data, args.test_frac, args.seed)
    else:
        train_data, test_data = data, None
    hp = _hyperparams(args, train_data)

    started = time.perf_counter()
    model, diagnostics = train(
        train_data, hp, test_data=test_data, early_stop=args.early_stop == "on"
    )
    elapsed = time.perf_counter() - started

    save_model(model, args.model_out)
    if args.curves_out:
        write_curves_csv(args.curves_out, diagnostics)
    if args.p_out:
        write_p_csv(args.p_out, model.final_p)
    if args.q_out:
        write_q_csv(args.q_out, model.final_q, train_data.feature_names)

    final_oop = diagnostics.oop[-1] if len(diagnostics.oop) else float("nan")
    print(
        f"trained {len(model.learners)} learners in {elapsed:.2f}s | "
        f"final oop={final_oop:.4f} | best iteration T={model.best_iteration}"
    )
    if diagnostics.test_accuracy is not None:
        print(f"test accuracy at final iteration: {diagnostics.test_accuracy[-1]:.4f}")
    return EXIT_OK


def cmd_predict(args) -> int:
    model = load_model(args.model_in)
    X, _ = load_features_csv(args.data)
    if X.shape[1] != model.n_features:
        raise DatasetError(
            f"feature width mismatch: model expects {model.n_features} columns, "
            f"input has {X.shape[1]}"
        )
    use_best = not args.all_learners
    labels = predict_many(model, X, use_best=use_best)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        if args.margins:
            margins = predict_margin_many(model, X, use_best=use_best)
            writer.writerow(["prediction", "margin"])
            for label, margin in zip(labels, margins):
                writer.writerow([int(label), _fmt(margin)])
        else:
            writer.writerow(["prediction"])
            for label in labels:
                writer.writerow([int(label)])
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model = load_model(args.model_in)
    data = load_csv(args.data, args.label_col, args.positive_label)
    if data.n_cols != model.n_features:
        raise DatasetError(
            f"feature width mismatch: model expects {model.n_features} columns, "
            f"input has {data.n_cols}"
        )
    predictions = predict_many(model, data.features, use_best=not args.all_learners)
    y = data.labels
    tp = int(((predictions == 1) & (y == 1)).sum())
    tn = int(((predictions == -1) & (y == -1)).sum())
    fp = int(((predictions == 1) & (y == -1)).sum())
    fn = int(((predictions == -1) & (y == 1)).sum())
    accuracy = (tp + tn) / data.n_rows
    if args.json:
        print(json.dumps({"accuracy": accuracy, "tp": tp, "tn": tn,
                          "fp": fp, "fn": fn, "n_rows": data.n_rows}))
    else:
        print(f"accuracy: {accuracy:.4f} on {data.n_rows} rows")
        print(f"confusion: tp={tp} tn={tn} fp={fp} fn={fn}")
    return EXIT_OK


def _suffixed(template, arm: str, seed: int):
    path = Path(template)
    return path.with_name(f"{path.stem}_{arm}_s{seed}{path.suffix}")


def cmd_ablate(args) -> int:
    data = _load_dataset(args)
    if not args.test_frac:
        raise ValueError("--test-frac must be positive for ablation (test curves are the output)")
    train_data, test_data = train_test_split(data, args.test_frac, args.seed)

    summary = {}
    with open(args.curves_out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["arm", "seed", "t", "test_acc"])
        for arm, rows_on, cols_on in ABLATION_ARMS:
            finals = []
            for rep in range(args.repeats):
                seed = args.seed + rep
                base = _hyperparams(args, train_data)
                hp = Hyperparams(
                    n=base.n, m=base.m, mu=base.mu, loss_kind=base.loss_kind,
                    depth_limit=base.depth_limit, t_max=base.t_max,
                    adaptive_rows=rows_on, adaptive_cols=cols_on,
                    importance_backend=base.importance_backend, seed=seed,
                )
                model, diagnostics = train(
                    train_data, hp, test_data=test_data,
                    early_stop=args.early_stop == "on",
                )
                for i, t in enumerate(diagnostics.iterations):
                    writer.writerow(
                        [arm, seed, int(t), _fmt(diagnostics.test_accuracy[i])]
                    )
                finals.append(float(diagnostics.test_accuracy[-1]))
                if args.p_out:
                    write_p_csv(_suffixed(args.p_out, arm, seed), model.final_p)
                if args.q_out:
                    write_q_csv(_suffixed(args.q_out, arm, seed), model.final_q,
                                train_data.feature_names)
            summary[arm] = float(np.mean(finals))
            print(f"arm {arm}: mean final test accuracy {summary[arm]:.4f} "
                  f"over {args.repeats} seeds")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpboost",
        description="Adaptive minipatch boosting for binary classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model and export curves/distributions")
    _add_data_flags(p_train)
    _add_train_flags(p_train)
    p_train.add_argument("--model-out", required=True, help="output model file (JSON)")
    p_train.add_argument("--curves-out", help="per-iteration accuracy CSV")
    p_train.add_argument("--p-out", help="final observation-distribution CSV")
    p_train.add_argument("--q-out", help="final feature-distribution CSV")
    p_train.set_defaults(func=cmd_train)

    p_predict = sub.add_parser("predict", help="predict labels for a feature CSV")
    p_predict.add_argument("--model-in", required=True)
    p_predict.add_argument("--data", required=True, help="feature CSV (no label column)")
    p_predict.add_argument("--out", help="output CSV (default: stdout)")
    p_predict.add_argument("--margins", action="store_true", help="include a margin column")
    p_predict.add_argument("--all-learners", action="store_true",
                           help="vote with every learner instead of the first T")
    p_predict.set_defaults(func=cmd_predict)

    p_eval = sub.add_parser("evaluate", help="accuracy and confusion counts on labeled data")
    p_eval.add_argument("--model-in", required=True)
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--label-col", default="label")
    p_eval.add_argument("--positive-label", default="1")
    p_eval.add_argument("--json", action="store_true")
    p_eval.add_argument("--all-learners", action="store_true")
    p_eval.set_defaults(func=cmd_evaluate)

    p_ablate = sub.add_parser(
        "ablate", help="run the 4 adaptive-sampling arms over repeated seeds"
    )
    _add_data_flags(p_ablate)
    _add_train_flags(p_ablate)
    p_ablate.add_argument("--repeats", type=int, default=5)
    p_ablate.add_argument("--curves-out", required=True,
                          help="long-format CSV: arm,seed,t,test_acc")
    p_ablate.add_argument("--p-out", help="template for per-run final p CSVs")
    p_ablate.add_argument("--q-out", help="template for per-run final q CSVs")
    p_ablate.set_defaults(func=cmd_ablate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DatasetError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ModelFormatError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
