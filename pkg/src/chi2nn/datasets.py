"""Loaders for the five benchmark datasets, plus seeded train/test splitting.

Each dataset lives under ``<data_root>/<id>/`` in its published raw layout and
is encoded by a per-dataset adapter. After encoding, row and class counts are
checked against the expected values recorded in EXPECTED_COUNTS; any mismatch
raises DataIntegrityError naming expected versus found.

Adapters:

* iris - keep the four numeric features; first class (setosa) -> 1,
  versicolor -> 0, virginica rows dropped.
* ilpd - gender encoded male=1/female=0; the four rows with a missing
  albumin/globulin ratio are dropped (the only reading that reproduces the
  published 414/165 class counts); the published counts put the 414 liver
  patients (raw class 1) in class 0 and the 165 others in class 1.
* ba - four numeric features as-is; class column used directly.
* bcw - sample-id column dropped; the 16 rows containing '?' dropped
  (683 = 444 + 239 remain); class 4 (malignant) -> 1, class 2 -> 0.
* balloons - the four raw files concatenated in a fixed order; each binary
  attribute encoded to 1/0 (yellow/small/stretch/adult -> 1); inflated=T -> 1.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataIntegrityError

DATASET_IDS = ("iris", "ilpd", "ba", "bcw", "balloons")

# dataset id -> (raw attribute count, negatives n0, positives n1)
EXPECTED_COUNTS = {
    "iris": (4, 50, 50),
    "ilpd": (10, 414, 165),
    "ba": (4, 762, 610),
    "bcw": (10, 444, 239),
    # The reference table for this benchmark lists 41/35; the four raw files,
    # reconstructed from their published generating rules, contain 40/36.
    "balloons": (4, 40, 36),
}

RAW_FILES = {
    "iris": ("iris.data",),
    "ilpd": ("ilpd.csv", "Indian Liver Patient Dataset (ILPD).csv"),
    "ba": ("data_banknote_authentication.txt", "banknote_authentication.csv"),
    "bcw": ("breast-cancer-wisconsin.data",),
    "balloons": (
        "adult+stretch.data",
        "adult-stretch.data",
        "yellow-small.data",
        "yellow-small+adult-stretch.data",
    ),
}


@dataclass(frozen=True)
class Dataset:
    """One encoded benchmark dataset: features, 0/1 labels, provenance."""

    id: str
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    source: str

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class Split:
    """Disjoint train/test row indices produced by one seeded shuffle."""

    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int
    train_fraction: float


def _read_rows(path, skip_header_if_text=True):
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise FileNotFoundError(f"raw data file not found: {path}") from None
    rows = [row for row in csv.reader(text.splitlines()) if row]
    if not rows:
        raise DataIntegrityError(f"{path}: file holds no data rows")
    if skip_header_if_text:
        try:
            float(rows[0][0])
        except ValueError:
            rows = rows[1:]
    if not rows:
        raise DataIntegrityError(f"{path}: file holds no data rows")
    return rows


def _resolve(source_dir, dataset_id):
    base = Path(source_dir)
    candidates = RAW_FILES[dataset_id]
    if dataset_id == "balloons":
        return [base / name for name in candidates]
    for name in candidates:
        if (base / name).exists():
            return [base / name]
    return [base / candidates[0]]


def _require_columns(path, rows, expected):
    for row in rows:
        if len(row) != expected:
            raise DataIntegrityError(
                f"{path}: expected {expected} columns per row, found {len(row)}: {row!r}"
            )


def _encode_iris(paths):
    rows = _read_rows(paths[0])
    _require_columns(paths[0], rows, 5)
    mapping = {"Iris-setosa": 1, "Iris-versicolor": 0}
    features, labels = [], []
    for row in rows:
        if row[4] in mapping:
            features.append([float(v) for v in row[:4]])
            labels.append(mapping[row[4]])
    names = ("sepal_length", "sepal_width", "petal_length", "petal_width")
    return features, labels, names


def _encode_ilpd(paths):
    rows = _read_rows(paths[0])
    _require_columns(paths[0], rows, 11)
    gender = {"Male": 1.0, "Female": 0.0}
    features, labels = [], []
    for row in rows:
        if row[9].strip() == "":
            continue  # the four rows with no albumin/globulin ratio
        if row[1] not in gender:
            raise DataIntegrityError(f"{paths[0]}: unknown gender value {row[1]!r}")
        features.append(
            [float(row[0]), gender[row[1]]] + [float(v) for v in row[2:10]]
        )
        labels.append(0 if row[10].strip() == "1" else 1)
    names = (
        "age", "gender", "total_bilirubin", "direct_bilirubin",
        "alkaline_phosphatase", "alanine_aminotransferase",
        "aspartate_aminotransferase", "total_protein", "albumin",
        "albumin_globulin_ratio",
    )
    return features, labels, names


def _encode_ba(paths):
    rows = _read_rows(paths[0])
    _require_columns(paths[0], rows, 5)
    features = [[float(v) for v in row[:4]] for row in rows]
    labels = [int(float(row[4])) for row in rows]
    names = ("wavelet_variance", "wavelet_skewness", "wavelet_curtosis", "image_entropy")
    return features, labels, names


def _encode_bcw(paths):
    rows = _read_rows(paths[0])
    _require_columns(paths[0], rows, 11)
    features, labels = [], []
    for row in rows:
        if "?" in row:
            continue
        features.append([float(v) for v in row[1:10]])  # column 0 is the sample id
        labels.append(1 if row[10] == "4" else 0)
    names = (
        "clump_thickness", "cell_size_uniformity", "cell_shape_uniformity",
        "marginal_adhesion", "single_epithelial_cell_size", "bare_nuclei",
        "bland_chromatin", "normal_nucleoli", "mitoses",
    )
    return features, labels, names


def _encode_balloons(paths):
    value = {
        "YELLOW": 1.0, "PURPLE": 0.0,
        "SMALL": 1.0, "LARGE": 0.0,
        "STRETCH": 1.0, "DIP": 0.0,
        "ADULT": 1.0, "CHILD": 0.0,
    }
    features, labels = [], []
    for path in paths:
        rows = _read_rows(path, skip_header_if_text=False)
        _require_columns(path, rows, 5)
        for row in rows:
            try:
                features.append([value[v.strip()] for v in row[:4]])
            except KeyError as exc:
                raise DataIntegrityError(f"{path}: unknown attribute value {exc}") from None
            labels.append(1 if row[4].strip() == "T" else 0)
    names = ("color", "size", "act", "age")
    return features, labels, names


_ENCODERS = {
    "iris": _encode_iris,
    "ilpd": _encode_ilpd,
    "ba": _encode_ba,
    "bcw": _encode_bcw,
    "balloons": _encode_balloons,
}


def load_dataset(dataset_id, source_dir):
    """Load and encode one dataset from its raw files under ``source_dir``.

    Raises FileNotFoundError when a raw file is absent and DataIntegrityError
    when the encoded shape or class counts disagree with EXPECTED_COUNTS.
    """
    if dataset_id not in _ENCODERS:
        raise ValueError(f"unknown dataset id {dataset_id!r}; expected one of {DATASET_IDS}")
    paths = _resolve(source_dir, dataset_id)
    for path in paths:
        if not path.exists():
            raise FileNotFoundError(f"raw data file not found: {path}")

    features, labels, names = _ENCODERS[dataset_id](paths)
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=np.int64)

    if x.size == 0:
        raise DataIntegrityError(f"{dataset_id}: no usable rows after encoding")
    if not np.all(np.isfinite(x)):
        raise DataIntegrityError(f"{dataset_id}: non-finite feature values after encoding")

    _, expected_n0, expected_n1 = EXPECTED_COUNTS[dataset_id]
    n1 = int(y.sum())
    n0 = int(y.shape[0] - n1)
    if (n0, n1) != (expected_n0, expected_n1):
        raise DataIntegrityError(
            f"{dataset_id}: expected class counts n0={expected_n0}, n1={expected_n1}, "
            f"found n0={n0}, n1={n1}"
        )
    x.setflags(write=False)
    y.setflags(write=False)
    return Dataset(
        id=dataset_id,
        features=x,
        labels=y,
        feature_names=names,
        source=str(Path(source_dir)),
    )


def _train_size(n, fraction):
    return int(np.floor(fraction * n + 0.5))


def split_dataset(dataset, train_fraction, seed):
    """Seeded uniform shuffle; the first round(fraction * n) rows train.

    Deterministic per (dataset, fraction, seed). Raises ValueError when either
    partition would be empty.
    """
    n = dataset.n_rows
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if n < 2:
        raise ValueError(f"need at least 2 rows to split, got {n}")
    k = _train_size(n, train_fraction)
    if k == 0 or k == n:
        raise ValueError(
            f"train_fraction {train_fraction} leaves an empty partition for n={n}"
        )
    perm = np.random.default_rng(seed).permutation(n)
    train = perm[:k].copy()
    test = perm[k:].copy()
    train.setflags(write=False)
    test.setflags(write=False)
    return Split(train_indices=train, test_indices=test, seed=seed, train_fraction=train_fraction)


def split_with_training_classes(dataset, train_fraction, seed, max_tries=1000):
    """split_dataset, retrying with seed+1 while a class is missing from train.

    Per-section positive shares are undefined without both classes in the
    training partition, so such splits are rejected.
    """
    for attempt in range(max_tries):
        split = split_dataset(dataset, train_fraction, seed + attempt)
        train_labels = dataset.labels[split.train_indices]
        if 0 < int(train_labels.sum()) < train_labels.shape[0]:
            return split
    raise ValueError(
        f"no split with both classes in training after {max_tries} seeds from {seed}"
    )


def dump_encoded(dataset, path):
    """Write the encoded matrix as CSV: header row, label column last."""
    lines = [",".join(dataset.feature_names + ("label",))]
    for row, label in zip(dataset.features, dataset.labels):
        lines.append(",".join(f"{v:.17g}" for v in row) + f",{int(label)}")
    Path(path).write_text("\n".join(lines) + "\n")
