"""Loading, generating, splitting, and validating binary-classification data.

Labels are always +1/-1.  Features are dense float64 matrices; CSV is the
interchange format (UTF-8, comma-delimited, one header row).
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .sampler import make_rng


class DatasetError(Exception):
    """A data file or dataset violates its contract."""


@dataclass(frozen=True)
class Dataset:
    """An immutable labeled dataset: N x M features, labels in {-1, +1}."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple | None = None

    def __post_init__(self):
        # own copies: freezing a view would freeze the caller's array too
        features = np.array(self.features, dtype=np.float64)
        labels = np.array(self.labels, dtype=np.int64)
        if features.ndim != 2 or features.shape[0] < 1 or features.shape[1] < 1:
            raise DatasetError("features must be a nonempty 2-D matrix")
        if not np.isfinite(features).all():
            raise DatasetError("features contain non-finite values")
        if labels.shape != (features.shape[0],):
            raise DatasetError("labels length must match the number of rows")
        if not np.isin(labels, (-1, 1)).all():
            raise DatasetError("labels must be -1 or +1")
        names = self.feature_names
        if names is not None:
            names = tuple(str(s) for s in names)
            if len(names) != features.shape[1]:
                raise DatasetError("feature_names length must equal the number of columns")
        features.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_cols(self) -> int:
        return self.features.shape[1]


def _parse_number(cell: str, row: int, col_name: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DatasetError(
            f"row {row}, column {col_name!r}: cannot parse {cell!r} as a number"
        ) from None
    if not math.isfinite(value):
        raise DatasetError(f"row {row}, column {col_name!r}: non-finite value {cell!r}")
    return value


def _resolve_column(label_column, header: list) -> int:
    if isinstance(label_column, int):
        if not 0 <= label_column < len(header):
            raise DatasetError(
                f"label column index {label_column} out of range for {len(header)} columns"
            )
        return label_column
    name = str(label_column)
    if name in header:
        return header.index(name)
    if name.lstrip("-").isdigit():
        return _resolve_column(int(name), header)
    raise DatasetError(f"label column {name!r} not found in header")


def load_csv(path, label_column, positive_label: str) -> Dataset:
    """Load a labeled CSV: header row, numeric feature cells, binary labels.

    The label column may be given by name or zero-based index.  The value
    equal to positive_label maps to +1, the remaining one to -1; exactly
    two distinct label values must occur.
    """
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot open {path}: {exc}") from None
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        if len(header) < 2:
            raise DatasetError(f"{path}: need at least one feature column and a label column")
        label_idx = _resolve_column(label_column, header)
        feature_cols = [j for j in range(len(header)) if j != label_idx]
        feature_names = tuple(header[j] for j in feature_cols)

        rows = []
        raw_labels = []
        for r, record in enumerate(reader, start=2):
            if len(record) != len(header):
                raise DatasetError(
                    f"row {r}: expected {len(header)} cells, found {len(record)}"
                )
            rows.append([_parse_number(record[j], r, header[j]) for j in feature_cols])
            raw_labels.append(record[label_idx])

    if not rows:
        raise DatasetError(f"{path}: no data rows")
    classes = sorted(set(raw_labels))
    if len(classes) != 2:
        raise DatasetError(
            f"expected binary labels, found {len(classes)} distinct values: {classes[:5]}"
        )
    positive = str(positive_label)
    if positive not in classes:
        raise DatasetError(
            f"positive label {positive!r} not present; classes are {classes}"
        )
    labels = np.array([1 if v == positive else -1 for v in raw_labels], dtype=np.int64)
    return Dataset(np.array(rows, dtype=np.float64), labels, feature_names)


def write_csv(data: Dataset, path, label_name: str = "label") -> None:
    """Write a Dataset as CSV; labels become "1"/"-1".

    Floats are written with repr so load_csv(write_csv(d)) reproduces the
    matrix exactly.
    """
    names = data.feature_names or tuple(f"f{j}" for j in range(data.n_cols))
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(names) + [label_name])
        for i in range(data.n_rows):
            writer.writerow(
                [repr(float(v)) for v in data.features[i]] + [str(int(data.labels[i]))]
            )


def load_features_csv(path):
    """Load an unlabeled feature CSV; returns (matrix, column names)."""
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot open {path}: {exc}") from None
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        rows = []
        for r, record in enumerate(reader, start=2):
            if len(record) != len(header):
                raise DatasetError(
                    f"row {r}: expected {len(header)} cells, found {len(record)}"
                )
            rows.append([_parse_number(record[j], r, header[j]) for j in range(len(header))])
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64), tuple(header)


def generate_cones(n_samples: int, informative_dims: int, noise_dims: int = 0,
                   margin: float = 0.3, seed: int = 0) -> Dataset:
    """Two opposing cones in the first informative_dims columns plus noise.

    Direction vectors are drawn uniformly on the unit sphere and kept when
    the first coordinate clears +-margin (rejection sampling, alternating
    until both classes are full), then scaled by a radius in (0.5, 2.0].
    The +1 cone opens along +axis0, the -1 cone along -axis0, so all class
    signal lives in the first informative_dims columns.  noise_dims extra
    columns are independent standard normals.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    if informative_dims < 1:
        raise ValueError("informative_dims must be >= 1")
    if noise_dims < 0:
        raise ValueError("noise_dims must be >= 0")
    if not 0 < margin < 1:
        raise ValueError("margin must be in (0, 1)")

    rng = make_rng(seed)
    need = {1: (n_samples + 1) // 2, -1: n_samples // 2}
    cone = np.empty((n_samples, informative_dims))
    labels = np.empty(n_samples, dtype=np.int64)
    i = 0
    while i < n_samples:
        u = rng.standard_normal(informative_dims)
        norm = math.sqrt(float(u @ u))
        if norm == 0.0:
            continue
        u /= norm
        if u[0] >= margin:
            label = 1
        elif u[0] <= -margin:
            label = -1
        else:
            continue
        if need[label] == 0:
            continue
        radius = 2.0 - rng.random() * 1.5  # uniform on (0.5, 2.0]
        cone[i] = radius * u
        labels[i] = label
        need[label] -= 1
        i += 1

    if noise_dims:
        noise = rng.standard_normal((n_samples, noise_dims))
        features = np.hstack([cone, noise])
    else:
        features = cone
    names = tuple(f"cone_{j}" for j in range(informative_dims)) + tuple(
        f"noise_{j}" for j in range(noise_dims)
    )
    return Dataset(features, labels, names)


def train_test_split(data: Dataset, test_fraction: float, seed: int):
    """Disjoint row split by a seeded permutation; returns (train, test).

    Train receives ceil(N * (1 - test_fraction)) rows.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    n = data.n_rows
    # tiny epsilon so e.g. 10 * (1 - 0.2) does not ceil to 9
    n_train = math.ceil(n * (1.0 - test_fraction) - 1e-9)
    if n_train < 1 or n_train >= n:
        raise ValueError("both split parts must be nonempty")
    perm = make_rng(seed).permutation(n)
    train_rows, test_rows = perm[:n_train], perm[n_train:]

    def take(rows):
        return Dataset(data.features[rows], data.labels[rows], data.feature_names)

    return take(train_rows), take(test_rows)
