"""Grid sweeps over (schedule, k, seed) cells with incremental, resumable output.

Every cell derives its randomness solely from its own seed (plus the plan's
fixed dataset seed), so cells are order-independent and safe to recompute in
isolation: deleting one cell file and re-running regenerates identical bytes.
Aggregates use the median over seeds for robustness to a stray diverged or
outlier run.
"""

from __future__ import annotations

import math
import re
import statistics
import warnings
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import NamedTuple, Sequence

from .datasets import DatasetSpec
from .errors import DomainError
from .network import ModelSpec
from .reporting import read_run_report, write_aggregate_csv, write_run_report
from .schedules import ScheduleSpec, schedule_from_dict
from .training import RunRecord, TrainConfig, expected_horizon, train

__all__ = [
    "ScheduleTemplate",
    "SweepPlan",
    "CellResult",
    "Aggregate",
    "SweepResult",
    "aggregate_cells",
    "run_sweep",
    "PairOrdering",
    "compare_loss_ordering",
    "best_k",
]

_ID_PATTERN = re.compile(r"^[A-Za-z0-9_.-]+$")


@dataclass(frozen=True)
class ScheduleTemplate:
    """A schedule family with everything fixed except k and the horizon."""

    id: str
    base: dict  # schedule dict without t0/k (family, eta0, eta_e, clamp, extras)

    def __post_init__(self):
        if not _ID_PATTERN.match(self.id):
            raise DomainError(f"schedule id {self.id!r} must be filename-safe")

    def materialize(self, t0: float, k: float) -> ScheduleSpec:
        return schedule_from_dict(self.base, t0=t0, k=k)


@dataclass(frozen=True)
class SweepPlan:
    schedules: tuple[ScheduleTemplate, ...]
    k_values: tuple[float, ...]
    seeds: tuple[int, ...]
    epochs: int
    batch_size: int
    momentum: float
    dataset: DatasetSpec
    model: ModelSpec
    out_dir: str

    def __post_init__(self):
        for name in ("schedules", "k_values", "seeds"):
            if not getattr(self, name):
                raise DomainError(f"sweep plan has empty {name}")
        ids = [s.id for s in self.schedules]
        if len(set(ids)) != len(ids):
            raise DomainError(f"duplicate schedule ids in plan: {ids}")
        if len(set(self.k_values)) != len(self.k_values):
            raise DomainError(f"duplicate k values in plan: {self.k_values}")
        if len(set(self.seeds)) != len(self.seeds):
            raise DomainError(f"duplicate seeds in plan: {self.seeds}")

    def num_cells(self) -> int:
        return len(self.schedules) * len(self.k_values) * len(self.seeds)


class CellResult(NamedTuple):
    final_test_error: float
    final_train_loss: float
    diverged: bool
    record_path: str


class Aggregate(NamedTuple):
    median_err: float
    min_err: float
    max_err: float
    n_diverged: int


@dataclass
class SweepResult:
    cells: dict  # (schedule_id, k, seed) -> CellResult
    aggregates: dict  # (schedule_id, k) -> Aggregate


def cell_filename(schedule_id: str, k: float, seed: int) -> str:
    return f"{schedule_id}__k{float(k)!r}__seed{seed}.jsonl"


def _final_train_loss(record: RunRecord) -> float:
    return record.epochs[-1].mean_train_loss if record.epochs else math.nan


def aggregate_cells(cells: dict) -> dict:
    """Per-(schedule, k) median/min/max of final test error over non-diverged seeds."""
    grouped: dict = {}
    for (sid, k, _seed), cell in cells.items():
        grouped.setdefault((sid, k), []).append(cell)
    aggregates = {}
    for key, group in grouped.items():
        errors = [c.final_test_error for c in group if not c.diverged]
        n_diverged = sum(1 for c in group if c.diverged)
        if errors:
            agg = Aggregate(statistics.median(errors), min(errors), max(errors), n_diverged)
        else:
            agg = Aggregate(math.nan, math.nan, math.nan, n_diverged)
        aggregates[key] = agg
    return aggregates


def run_sweep(plan: SweepPlan, resume: bool = False, include_wall_time: bool = False) -> SweepResult:
    """Execute every (schedule, k, seed) cell and write incremental reports.

    Each finished cell is flushed to ``<out_dir>/cells/`` immediately, so an
    interrupted sweep re-run with ``resume=True`` skips completed cells and
    produces the identical result. The aggregate CSV is rebuilt from cells at
    the end either way. Cell files carry wall times only when asked, keeping
    default output byte-stable across reruns.
    """
    out_dir = Path(plan.out_dir)
    cells_dir = out_dir / "cells"
    cells_dir.mkdir(parents=True, exist_ok=True)

    dataset = plan.dataset.build()
    t0 = expected_horizon(dataset.train_idx.size, plan.batch_size, plan.epochs)

    cells = {}
    for template, k, seed in product(plan.schedules, plan.k_values, plan.seeds):
        path = cells_dir / cell_filename(template.id, k, seed)
        if resume and path.exists():
            record = read_run_report(path)
        else:
            spec = template.materialize(float(t0), k)
            model = plan.model.build(dataset.num_features, dataset.num_classes, seed)
            config = TrainConfig(
                schedule=spec,
                epochs=plan.epochs,
                batch_size=plan.batch_size,
                momentum=plan.momentum,
                seed=seed,
            )
            record = train(model, dataset, config)
            write_run_report(path, record, include_wall_time=include_wall_time)
        cells[(template.id, k, seed)] = CellResult(
            record.final_test_error, _final_train_loss(record), record.diverged, str(path)
        )

    aggregates = aggregate_cells(cells)
    write_aggregate_csv(out_dir / "aggregate.csv", aggregates)
    return SweepResult(cells=cells, aggregates=aggregates)


class PairOrdering(NamedTuple):
    k_hi: float
    k_lo: float
    fraction: float  # fraction of window epochs with loss(k_hi) >= loss(k_lo)
    epochs_compared: int


def _config_without_k(config: dict) -> dict:
    stripped = dict(config)
    schedule = dict(stripped.get("schedule", {}))
    schedule.pop("k", None)
    stripped["schedule"] = schedule
    return stripped


def compare_loss_ordering(
    records: Sequence[tuple[float, RunRecord]],
    window: tuple[float, float] = (0.0, 1.0),
) -> list[PairOrdering]:
    """For each k-pair, how often the larger-k loss curve sits on top.

    ``records`` holds (k, record) pairs from runs identical except for k.
    Per-epoch mean train losses are compared over the epochs whose midpoint
    falls inside ``window`` (a fraction interval of the run); ties count as
    satisfying >=.
    """
    if len(records) < 2:
        raise DomainError("need at least two records to compare")
    lo, hi = window
    if not 0.0 <= lo <= hi <= 1.0:
        raise DomainError(f"window must satisfy 0 <= lo <= hi <= 1, got {window}")

    reference = _config_without_k(records[0][1].config)
    n_epochs = len(records[0][1].epochs)
    for k, record in records[1:]:
        if _config_without_k(record.config) != reference:
            raise DomainError(f"record for k={k} differs from the others beyond k")
        if len(record.epochs) != n_epochs:
            raise DomainError(f"record for k={k} has {len(record.epochs)} epochs, expected {n_epochs}")
    if n_epochs == 0:
        raise DomainError("records contain no epoch statistics")

    selected = [e for e in range(n_epochs) if lo <= (e + 0.5) / n_epochs <= hi]
    if not selected:
        raise DomainError(f"window {window} selects no epochs out of {n_epochs}")

    orderings = []
    for i in range(len(records)):
        for j in range(i + 1, len(records)):
            (k_a, rec_a), (k_b, rec_b) = records[i], records[j]
            if k_a >= k_b:
                k_hi, rec_hi, k_lo, rec_lo = k_a, rec_a, k_b, rec_b
            else:
                k_hi, rec_hi, k_lo, rec_lo = k_b, rec_b, k_a, rec_a
            wins = sum(
                1
                for e in selected
                if rec_hi.epochs[e].mean_train_loss >= rec_lo.epochs[e].mean_train_loss
            )
            orderings.append(PairOrdering(k_hi, k_lo, wins / len(selected), len(selected)))
    return orderings


def best_k(result: SweepResult, schedule_id: str) -> tuple[float, float]:
    """The k with the lowest median final test error; ties go to the smaller k.

    k values whose every seed diverged are excluded with a warning.
    """
    ks = sorted({k for (sid, k) in result.aggregates if sid == schedule_id})
    if not ks:
        raise DomainError(f"schedule {schedule_id!r} not present in sweep result")
    best = None
    for k in ks:
        agg = result.aggregates[(schedule_id, k)]
        if math.isnan(agg.median_err):
            warnings.warn(
                f"all seeds diverged for schedule={schedule_id} k={k}; excluded from best_k",
                stacklevel=2,
            )
            continue
        if best is None or agg.median_err < best[1]:
            best = (k, agg.median_err)
    if best is None:
        raise DomainError(f"every cell diverged for schedule {schedule_id!r}")
    return best
