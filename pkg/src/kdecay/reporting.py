"""File formats: curve CSV, json-lines run reports, and the sweep aggregate CSV.

All numeric serialization uses Python's shortest round-trip float repr, so
values reparse bit-equal. Writes are whole-file atomic (temp file + rename),
and nothing here touches wall clocks unless asked: reports are byte-stable
across reruns of the same seeds. Wall time is therefore opt-in via
``include_wall_time``; non-finite values serialize as JSON null.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

from .errors import ConfigError
from .schedules import CurveSample
from .training import EpochRecord, RunRecord

__all__ = [
    "atomic_write_text",
    "write_curve_csv",
    "read_curve_csv",
    "run_report_text",
    "write_run_report",
    "read_run_report",
    "write_aggregate_csv",
]

CURVE_HEADER = "t,lr"
AGGREGATE_HEADER = "schedule,k,median_err,min_err,max_err,n_diverged"


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fnum(x: float) -> str:
    return repr(float(x))


def write_curve_csv(path, samples: list[CurveSample]) -> None:
    lines = [CURVE_HEADER]
    lines += [f"{_fnum(s.t)},{_fnum(s.lr)}" for s in samples]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_curve_csv(path) -> list[CurveSample]:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CURVE_HEADER:
            raise ConfigError(f"{path}: expected header {CURVE_HEADER!r}, got {header!r}")
        samples = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            t_str, lr_str = line.split(",")
            samples.append(CurveSample(float(t_str), float(lr_str)))
    return samples


def _json_value(x: float):
    return x if math.isfinite(x) else None


def run_report_text(record: RunRecord, include_wall_time: bool = False) -> str:
    """Render a run record as json-lines: one epoch object per line plus a summary."""
    lines = []
    for epoch in record.epochs:
        lines.append(
            json.dumps(
                {
                    "epoch": epoch.epoch,
                    "mean_train_loss": _json_value(epoch.mean_train_loss),
                    "test_error": _json_value(epoch.test_error),
                },
                sort_keys=True,
            )
        )
    summary = {
        "final_test_error": _json_value(record.final_test_error),
        "diverged": record.diverged,
        "config": record.config,
    }
    if include_wall_time:
        summary["wall_time_s"] = record.wall_time_s
    lines.append(json.dumps(summary, sort_keys=True))
    return "\n".join(lines) + "\n"


def write_run_report(path, record: RunRecord, include_wall_time: bool = False) -> None:
    atomic_write_text(path, run_report_text(record, include_wall_time))


def _from_json_value(x) -> float:
    return math.nan if x is None else float(x)


def read_run_report(path) -> RunRecord:
    """Load a report back into a RunRecord.

    The per-step series is not part of the report format, so ``steps`` comes
    back empty; epoch statistics and the summary are fully restored.
    """
    epochs: list[EpochRecord] = []
    summary = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}:{lineno}: invalid json-lines: {exc.msg}") from None
            if "epoch" in obj:
                epochs.append(
                    EpochRecord(
                        int(obj["epoch"]),
                        _from_json_value(obj["mean_train_loss"]),
                        _from_json_value(obj["test_error"]),
                    )
                )
            elif "final_test_error" in obj:
                summary = obj
            else:
                raise ConfigError(f"{path}:{lineno}: unrecognized report line")
    if summary is None:
        raise ConfigError(f"{path}: report has no summary line")
    return RunRecord(
        steps=[],
        epochs=epochs,
        final_test_error=_from_json_value(summary["final_test_error"]),
        diverged=bool(summary["diverged"]),
        config=summary.get("config", {}),
        wall_time_s=float(summary.get("wall_time_s", 0.0)),
    )


def write_aggregate_csv(path, aggregates: dict) -> None:
    """Aggregate rows sorted by (schedule, k) for byte-stable output.

    ``aggregates`` maps (schedule_id, k) to an object with fields
    ``median_err``, ``min_err``, ``max_err``, ``n_diverged``.
    """
    lines = [AGGREGATE_HEADER]
    for (sid, k) in sorted(aggregates):
        agg = aggregates[(sid, k)]
        lines.append(
            f"{sid},{_fnum(k)},{_fnum(agg.median_err)},{_fnum(agg.min_err)},"
            f"{_fnum(agg.max_err)},{agg.n_diverged}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")
