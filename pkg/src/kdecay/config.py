"""Config files for single runs and sweep plans.

The format is JSON with nested sections (documented in the README):

    {
      "schema_version": "1",
      "schedule": {"family": "pol", "n": 1.0, "k": 1.5, ...},
      "training": {"epochs": 30, "batch_size": 32, "momentum": 0.9, "seed": 0},
      "dataset": {"kind": "two_spirals", "num_samples": 2000, ...},
      "model": {"hidden": [32, 32], "activation": "tanh"}
    }

Sweep plans replace ``training.seed`` with a ``sweep`` section carrying
``schedules`` (templates with an ``id``), ``k_values``, and ``seeds``.
The schedule horizon ``t0`` is always derived from the data and the
training protocol, never written in a file. Parsing is strict: unknown
keys are rejected, and every diagnostic names the offending field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .datasets import DatasetSpec
from .errors import ConfigError
from .network import ACTIVATIONS, MlpModel, ModelSpec
from .schedules import ScheduleSpec, schedule_from_dict
from .sweep import ScheduleTemplate, SweepPlan
from .training import TrainConfig, expected_horizon

__all__ = ["TrainFileConfig", "SweepFileConfig", "load_json_file", "load_train_config", "load_sweep_config"]

SCHEMA_VERSION = "1"


def load_json_file(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from None


def _require_mapping(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(obj).__name__}", where)
    return dict(obj)


def _take(section: dict, where: str, key: str, kind, default=...):
    if key not in section:
        if default is ...:
            raise ConfigError(f"{where}.{key} is required", f"{where}.{key}")
        return default
    value = section.pop(key)
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is int and isinstance(value, bool):
        raise ConfigError(f"{where}.{key} must be an integer, got a boolean", f"{where}.{key}")
    if not isinstance(value, kind):
        raise ConfigError(
            f"{where}.{key} must be {getattr(kind, '__name__', kind)}, got {value!r}",
            f"{where}.{key}",
        )
    return value


def _reject_leftovers(section: dict, where: str):
    if section:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(section)}", where)


def _parse_dataset(section: dict) -> DatasetSpec:
    section = _require_mapping(section, "dataset")
    kind = _take(section, "dataset", "kind", str)
    seed = _take(section, "dataset", "seed", int, 0)
    if kind == "csv":
        path = _take(section, "dataset", "path", str)
        _reject_leftovers(section, "dataset")
        return DatasetSpec(kind="csv", path=path, seed=seed)
    num_samples = _take(section, "dataset", "num_samples", int)
    num_classes = _take(section, "dataset", "num_classes", int)
    noise = _take(section, "dataset", "noise", float, 0.0)
    _reject_leftovers(section, "dataset")
    return DatasetSpec(kind, num_samples, num_classes, noise, seed)


def _parse_model(section) -> ModelSpec:
    if section is None:
        return ModelSpec()
    section = _require_mapping(section, "model")
    hidden = _take(section, "model", "hidden", list, [32, 32])
    if not all(isinstance(h, int) and not isinstance(h, bool) and h > 0 for h in hidden):
        raise ConfigError("model.hidden must be a list of positive integers", "model.hidden")
    activation = _take(section, "model", "activation", str, "tanh")
    if activation not in ACTIVATIONS:
        raise ConfigError(f"model.activation must be one of {ACTIVATIONS}", "model.activation")
    _reject_leftovers(section, "model")
    return ModelSpec(tuple(hidden), activation)


def _validate_schedule_section(section: dict) -> dict:
    section = _require_mapping(section, "schedule")
    if "t0" in section:
        raise ConfigError(
            "schedule.t0 is derived from the training protocol; remove it", "schedule.t0"
        )
    # dry construction with a dummy horizon surfaces bad fields early
    try:
        dummy_t0 = max(2.0 * max(float(m) for m in section.get("milestones", [])), 1.0)
    except (TypeError, ValueError):
        dummy_t0 = 1.0
    schedule_from_dict(section, t0=dummy_t0)
    return section


@dataclass(frozen=True)
class TrainFileConfig:
    """Parsed single-run config; ``realize`` builds the live objects."""

    schedule: dict
    epochs: int
    batch_size: int
    momentum: float
    seed: int
    loss: str
    dataset: DatasetSpec
    model: ModelSpec
    schema_version: str = SCHEMA_VERSION

    @classmethod
    def from_dict(cls, data: dict) -> "TrainFileConfig":
        data = _require_mapping(data, "config")
        schema_version = _take(data, "config", "schema_version", str, SCHEMA_VERSION)
        schedule = _validate_schedule_section(_take(data, "config", "schedule", dict))
        training = _require_mapping(_take(data, "config", "training", dict), "training")
        dataset = _parse_dataset(_take(data, "config", "dataset", dict))
        model = _parse_model(data.pop("model", None))
        _reject_leftovers(data, "config")

        epochs = _take(training, "training", "epochs", int)
        batch_size = _take(training, "training", "batch_size", int)
        momentum = _take(training, "training", "momentum", float, 0.9)
        seed = _take(training, "training", "seed", int, 0)
        loss = _take(training, "training", "loss", str, "cross_entropy")
        _reject_leftovers(training, "training")
        return cls(schedule, epochs, batch_size, momentum, seed, loss, dataset, model, schema_version)

    def to_dict(self) -> dict:
        dataset = {"kind": self.dataset.kind, "seed": self.dataset.seed}
        if self.dataset.kind == "csv":
            dataset["path"] = self.dataset.path
        else:
            dataset.update(
                num_samples=self.dataset.num_samples,
                num_classes=self.dataset.num_classes,
                noise=self.dataset.noise,
            )
        return {
            "schema_version": self.schema_version,
            "schedule": dict(self.schedule),
            "training": {
                "epochs": self.epochs,
                "batch_size": self.batch_size,
                "momentum": self.momentum,
                "seed": self.seed,
                "loss": self.loss,
            },
            "dataset": dataset,
            "model": {"hidden": list(self.model.hidden), "activation": self.model.activation},
        }

    def realize(self):
        """Build (model, dataset, train_config), deriving the schedule horizon."""
        dataset = self.dataset.build()
        if self.batch_size > dataset.train_idx.size:
            raise ConfigError(
                f"training.batch_size ({self.batch_size}) exceeds the train split "
                f"({dataset.train_idx.size})",
                "training.batch_size",
            )
        horizon = expected_horizon(dataset.train_idx.size, self.batch_size, self.epochs)
        spec: ScheduleSpec = schedule_from_dict(self.schedule, t0=float(max(horizon, 1)))
        model: MlpModel = self.model.build(dataset.num_features, dataset.num_classes, self.seed)
        config = TrainConfig(
            schedule=spec,
            epochs=self.epochs,
            batch_size=self.batch_size,
            momentum=self.momentum,
            seed=self.seed,
            loss=self.loss,
        )
        return model, dataset, config


@dataclass(frozen=True)
class SweepFileConfig:
    """Parsed sweep plan; ``to_plan`` binds it to an output directory."""

    schedules: tuple[ScheduleTemplate, ...]
    k_values: tuple[float, ...]
    seeds: tuple[int, ...]
    epochs: int
    batch_size: int
    momentum: float
    loss: str
    dataset: DatasetSpec
    model: ModelSpec
    schema_version: str = SCHEMA_VERSION

    @classmethod
    def from_dict(cls, data: dict) -> "SweepFileConfig":
        data = _require_mapping(data, "config")
        schema_version = _take(data, "config", "schema_version", str, SCHEMA_VERSION)
        sweep = _require_mapping(_take(data, "config", "sweep", dict), "sweep")
        training = _require_mapping(_take(data, "config", "training", dict), "training")
        dataset = _parse_dataset(_take(data, "config", "dataset", dict))
        model = _parse_model(data.pop("model", None))
        _reject_leftovers(data, "config")

        raw_schedules = _take(sweep, "sweep", "schedules", list)
        k_values = _take(sweep, "sweep", "k_values", list)
        seeds = _take(sweep, "sweep", "seeds", list)
        _reject_leftovers(sweep, "sweep")

        templates = []
        for i, entry in enumerate(raw_schedules):
            where = f"sweep.schedules[{i}]"
            entry = _require_mapping(entry, where)
            sid = _take(entry, where, "id", str)
            for banned in ("k", "t0"):
                if banned in entry:
                    raise ConfigError(
                        f"{where}.{banned} is not allowed in a template "
                        f"({'k comes from sweep.k_values' if banned == 'k' else 't0 is derived'})",
                        f"{where}.{banned}",
                    )
            _validate_schedule_section(entry)
            templates.append(ScheduleTemplate(sid, entry))

        if not all(isinstance(k, (int, float)) and not isinstance(k, bool) for k in k_values):
            raise ConfigError("sweep.k_values must be numbers", "sweep.k_values")
        if not all(isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in seeds):
            raise ConfigError("sweep.seeds must be nonnegative integers", "sweep.seeds")

        epochs = _take(training, "training", "epochs", int)
        batch_size = _take(training, "training", "batch_size", int)
        momentum = _take(training, "training", "momentum", float, 0.9)
        loss = _take(training, "training", "loss", str, "cross_entropy")
        if loss != "cross_entropy":
            raise ConfigError(f"training.loss must be 'cross_entropy', got {loss!r}", "training.loss")
        if "seed" in training:
            raise ConfigError(
                "training.seed is not allowed in a sweep plan; use sweep.seeds", "training.seed"
            )
        _reject_leftovers(training, "training")
        return cls(
            tuple(templates),
            tuple(float(k) for k in k_values),
            tuple(int(s) for s in seeds),
            epochs,
            batch_size,
            momentum,
            loss,
            dataset,
            model,
            schema_version,
        )

    def to_dict(self) -> dict:
        dataset = {"kind": self.dataset.kind, "seed": self.dataset.seed}
        if self.dataset.kind == "csv":
            dataset["path"] = self.dataset.path
        else:
            dataset.update(
                num_samples=self.dataset.num_samples,
                num_classes=self.dataset.num_classes,
                noise=self.dataset.noise,
            )
        return {
            "schema_version": self.schema_version,
            "sweep": {
                "schedules": [{"id": t.id, **t.base} for t in self.schedules],
                "k_values": list(self.k_values),
                "seeds": list(self.seeds),
            },
            "training": {
                "epochs": self.epochs,
                "batch_size": self.batch_size,
                "momentum": self.momentum,
                "loss": self.loss,
            },
            "dataset": dataset,
            "model": {"hidden": list(self.model.hidden), "activation": self.model.activation},
        }

    def to_plan(self, out_dir: str) -> SweepPlan:
        return SweepPlan(
            schedules=self.schedules,
            k_values=self.k_values,
            seeds=self.seeds,
            epochs=self.epochs,
            batch_size=self.batch_size,
            momentum=self.momentum,
            dataset=self.dataset,
            model=self.model,
            out_dir=out_dir,
        )


def load_train_config(path) -> TrainFileConfig:
    return TrainFileConfig.from_dict(load_json_file(path))


def load_sweep_config(path) -> SweepFileConfig:
    return SweepFileConfig.from_dict(load_json_file(path))
