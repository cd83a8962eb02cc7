"""Deterministic SGD-with-momentum training over a schedule.

The schedule is queried once per batch at the global batch index, so a
run's horizon T0 must equal ``epochs * ceil(train_size / batch_size)``.
Given a seed, data order, updates, and all recorded series are bit-for-bit
reproducible on one machine.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .datasets import Dataset
from .errors import DivergenceError, DomainError
from .network import MlpModel, evaluate_error, forward_backward
from .schedules import ScheduleSpec, evaluate, schedule_to_dict

__all__ = [
    "TrainConfig",
    "StepRecord",
    "EpochRecord",
    "RunRecord",
    "batches_per_epoch",
    "expected_horizon",
    "init_velocity",
    "sgd_momentum_step",
    "train",
]


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer protocol for one run; the schedule rides along as a spec."""

    schedule: ScheduleSpec
    epochs: int
    batch_size: int
    momentum: float = 0.9
    seed: int = 0
    loss: str = "cross_entropy"

    def __post_init__(self):
        if not isinstance(self.epochs, int) or self.epochs < 0:
            raise DomainError(f"epochs must be a nonnegative integer, got {self.epochs!r}")
        if not isinstance(self.batch_size, int) or self.batch_size < 1:
            raise DomainError(f"batch_size must be a positive integer, got {self.batch_size!r}")
        if not 0.0 <= self.momentum < 1.0:
            raise DomainError(f"momentum must lie in [0, 1), got {self.momentum}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise DomainError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if self.loss != "cross_entropy":
            raise DomainError(f"unsupported loss {self.loss!r}")


class StepRecord(NamedTuple):
    t: int
    lr: float
    loss: float


class EpochRecord(NamedTuple):
    epoch: int
    mean_train_loss: float
    test_error: float


@dataclass
class RunRecord:
    """Everything one run produced: per-step series, per-epoch stats, summary."""

    steps: list[StepRecord] = field(default_factory=list)
    epochs: list[EpochRecord] = field(default_factory=list)
    final_test_error: float = math.nan
    diverged: bool = False
    config: dict = field(default_factory=dict)
    wall_time_s: float = 0.0


def batches_per_epoch(train_size: int, batch_size: int) -> int:
    return math.ceil(train_size / batch_size)


def expected_horizon(train_size: int, batch_size: int, epochs: int) -> int:
    """The schedule horizon a run will traverse: one unit per batch."""
    return epochs * batches_per_epoch(train_size, batch_size)


def init_velocity(model: MlpModel):
    return [(np.zeros_like(w), np.zeros_like(b)) for w, b in zip(model.weights, model.biases)]


def sgd_momentum_step(model: MlpModel, grads, velocity, lr: float, momentum: float):
    """In-place update: v <- momentum * v + g; w <- w - lr * v."""
    if not math.isfinite(lr):
        raise DomainError(f"learning rate must be finite, got {lr!r}")
    for (w, b), (dw, db), (vw, vb) in zip(
        zip(model.weights, model.biases), grads, velocity, strict=True
    ):
        vw *= momentum
        vw += dw
        vb *= momentum
        vb += db
        w -= lr * vw
        b -= lr * vb
    return model, velocity


def _config_echo(config: TrainConfig, model: MlpModel, dataset: Dataset) -> dict:
    return {
        "schedule": schedule_to_dict(config.schedule),
        "epochs": config.epochs,
        "batch_size": config.batch_size,
        "momentum": config.momentum,
        "seed": config.seed,
        "loss": config.loss,
        "model": {"dims": list(model.dims), "activation": model.activation},
        "dataset": {
            "num_samples": int(dataset.inputs.shape[0]),
            "num_features": int(dataset.num_features),
            "num_classes": int(dataset.num_classes),
            "train_size": int(dataset.train_idx.size),
            "test_size": int(dataset.test_idx.size),
        },
    }


def _all_finite(model: MlpModel) -> bool:
    return all(
        np.all(np.isfinite(w)) and np.all(np.isfinite(b))
        for w, b in zip(model.weights, model.biases)
    )


def train(model: MlpModel, dataset: Dataset, config: TrainConfig) -> RunRecord:
    """Train ``model`` in place and return the full run record.

    The schedule is evaluated at t = 0, 1, ..., T0-1 (one query per batch).
    A non-finite loss or parameter aborts the run with ``diverged`` set;
    everything recorded up to that point stays in the record.
    """
    started = time.perf_counter()
    train_idx = dataset.train_idx
    n = int(train_idx.size)
    if config.batch_size > n:
        raise DomainError(f"batch_size ({config.batch_size}) exceeds train split size ({n})")
    if config.epochs > 0:
        horizon = expected_horizon(n, config.batch_size, config.epochs)
        if config.schedule.params.t0 != horizon:
            raise DomainError(
                f"schedule horizon t0={config.schedule.params.t0} must equal "
                f"epochs * ceil(train_size / batch_size) = {horizon}"
            )

    record = RunRecord(config=_config_echo(config, model, dataset))
    rng = np.random.default_rng(config.seed)
    velocity = init_velocity(model)
    t = 0
    for epoch in range(config.epochs):
        perm = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, config.batch_size):
            sel = train_idx[perm[start : start + config.batch_size]]
            lr = evaluate(config.schedule, float(t))
            try:
                loss, grads = forward_backward(model, dataset.inputs[sel], dataset.labels[sel])
            except DivergenceError:
                record.diverged = True
                break
            record.steps.append(StepRecord(t, lr, loss))
            epoch_losses.append(loss)
            sgd_momentum_step(model, grads, velocity, lr, config.momentum)
            if not _all_finite(model):
                record.diverged = True
                break
            t += 1
        if record.diverged:
            break
        record.epochs.append(
            EpochRecord(epoch, float(np.mean(epoch_losses)), evaluate_error(model, dataset, "test"))
        )
    record.final_test_error = (
        math.nan if record.diverged else evaluate_error(model, dataset, "test")
    )
    record.wall_time_s = time.perf_counter() - started
    return record
