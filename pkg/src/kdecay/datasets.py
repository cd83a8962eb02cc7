"""Synthetic classification datasets and CSV ingestion for the desk-scale harness.

Generators are fully deterministic from their seed: the same arguments
always produce the same arrays, byte for byte.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["Dataset", "DatasetSpec", "make_synthetic_dataset", "load_csv_dataset"]

TRAIN_FRACTION = 0.8


@dataclass
class Dataset:
    """Feature matrix plus integer labels and a fixed train/test partition."""

    inputs: np.ndarray  # (num_samples, num_features) float64
    labels: np.ndarray  # (num_samples,) int64 in [0, num_classes)
    train_idx: np.ndarray
    test_idx: np.ndarray
    num_classes: int

    def __post_init__(self):
        if not np.all(np.isfinite(self.inputs)):
            raise DomainError("dataset inputs must be finite")
        if self.labels.min() < 0 or self.labels.max() >= self.num_classes:
            raise DomainError("labels must lie in [0, num_classes)")
        if np.intersect1d(self.train_idx, self.test_idx).size:
            raise DomainError("train and test splits overlap")
        train_classes = set(np.unique(self.labels[self.train_idx]).tolist())
        if train_classes != set(range(self.num_classes)):
            raise DomainError("every class must appear in the train split")

    @property
    def num_features(self) -> int:
        return self.inputs.shape[1]

    def split(self, name: str) -> np.ndarray:
        if name == "train":
            return self.train_idx
        if name == "test":
            return self.test_idx
        raise DomainError(f"unknown split {name!r}; expected 'train' or 'test'")


def _balanced_labels(num_samples: int, num_classes: int) -> np.ndarray:
    """Class counts differing by at most one, grouped by class."""
    base, extra = divmod(num_samples, num_classes)
    counts = [base + (1 if c < extra else 0) for c in range(num_classes)]
    return np.repeat(np.arange(num_classes, dtype=np.int64), counts)


def _stratified_split(labels: np.ndarray, rng: np.random.Generator):
    train_parts, test_parts = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        idx = rng.permutation(idx)
        n_train = int(round(TRAIN_FRACTION * idx.size))
        n_train = min(max(n_train, 1), idx.size - 1)
        train_parts.append(idx[:n_train])
        test_parts.append(idx[n_train:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(test_parts))


def make_synthetic_dataset(
    kind: str,
    num_samples: int,
    num_classes: int,
    noise: float,
    seed: int,
) -> Dataset:
    """Generate a 2-D classification dataset with a stratified 80/20 split.

    Kinds:
        gaussian_blobs: one isotropic blob per class, centers on a circle;
            linearly separable at noise 0.
        two_spirals: two interleaved spiral arms (num_classes must be 2);
            not linearly separable.
    """
    if num_classes < 1:
        raise DomainError("num_classes must be >= 1")
    if num_samples < 10 * num_classes:
        raise DomainError(f"need at least 10 samples per class, got {num_samples} for {num_classes}")
    if noise < 0 or not math.isfinite(noise):
        raise DomainError(f"noise must be a nonnegative real, got {noise}")

    rng = np.random.default_rng(seed)
    labels = _balanced_labels(num_samples, num_classes)

    if kind == "gaussian_blobs":
        angles = 2.0 * math.pi * np.arange(num_classes) / num_classes
        centers = 4.0 * np.stack([np.cos(angles), np.sin(angles)], axis=1)
        inputs = centers[labels] + noise * rng.standard_normal((num_samples, 2))
    elif kind == "two_spirals":
        if num_classes != 2:
            raise DomainError("two_spirals requires num_classes == 2")
        # sqrt-spaced angles give uniform arm coverage; radius grows linearly.
        # Each arm sweeps 1.25 turns starting away from the origin.
        theta = 0.5 * math.pi + 2.5 * math.pi * np.sqrt(rng.uniform(0.0, 1.0, size=num_samples))
        radius = theta / (3.0 * math.pi)
        sign = np.where(labels == 0, 1.0, -1.0)
        inputs = np.stack(
            [sign * radius * np.cos(theta), sign * radius * np.sin(theta)], axis=1
        )
        inputs += noise * rng.standard_normal((num_samples, 2))
    else:
        raise DomainError(f"unknown dataset kind {kind!r}")

    train_idx, test_idx = _stratified_split(labels, rng)
    return Dataset(np.ascontiguousarray(inputs, dtype=np.float64), labels, train_idx, test_idx, num_classes)


@dataclass(frozen=True)
class DatasetSpec:
    """Declarative dataset description, buildable deterministically from its seed."""

    kind: str  # gaussian_blobs | two_spirals | csv
    num_samples: int = 0
    num_classes: int = 0
    noise: float = 0.0
    seed: int = 0
    path: str | None = None

    def build(self) -> Dataset:
        if self.kind == "csv":
            if not self.path:
                raise DomainError("csv dataset spec needs a path")
            return load_csv_dataset(self.path, seed=self.seed)
        return make_synthetic_dataset(
            self.kind, self.num_samples, self.num_classes, self.noise, self.seed
        )


def load_csv_dataset(path: str, seed: int = 0) -> Dataset:
    """Load a dataset from CSV: header row, real feature columns, final integer label column.

    The stratified 80/20 split is drawn deterministically from ``seed``.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DomainError(f"{path}: empty CSV") from None
        if len(header) < 2:
            raise DomainError(f"{path}: need at least one feature column and a label column")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DomainError(f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}")
            try:
                feats = [float(v) for v in row[:-1]]
                label = int(row[-1])
            except ValueError as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from None
            rows.append((feats, label))
    if not rows:
        raise DomainError(f"{path}: no data rows")

    inputs = np.array([r[0] for r in rows], dtype=np.float64)
    labels = np.array([r[1] for r in rows], dtype=np.int64)
    if labels.min() < 0:
        raise DomainError(f"{path}: labels must be nonnegative integers")
    num_classes = int(labels.max()) + 1
    rng = np.random.default_rng(seed)
    train_idx, test_idx = _stratified_split(labels, rng)
    return Dataset(inputs, labels, train_idx, test_idx, num_classes)
