"""Learning-rate schedules: the k-decay family and its comparison baselines.

The k-decay construction adds a term

    (eta0 - eta_e) * ((t/T0)**k - t/T0)

to a base decay schedule (polynomial, cosine, or exponential). The term
vanishes at both endpoints and at ``k = 1``, so every k-decay family
coincides with its base schedule at ``k = 1``; the hyperparameter ``k``
reshapes how fast the rate changes between the endpoints. For some
``(k, N)`` the raw formulas dip below ``eta_e`` (even below zero), so
specs clamp evaluated rates into ``[eta_e, eta0]`` by default.

Everything here is pure and stateless: the LR at time ``t`` depends only on
the immutable spec, so specs may be evaluated concurrently with no
synchronization.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, replace
from typing import NamedTuple, Union

from .errors import ConfigError, DomainError, UnsupportedCaseError

__all__ = [
    "KDecayParams",
    "PolynomialKDecay",
    "CosineKDecay",
    "ExpKDecay",
    "StepDecay",
    "Sgdr",
    "Clr",
    "Htd",
    "ScheduleSpec",
    "CurveSample",
    "kdecay_term",
    "lr_polynomial_kdecay",
    "lr_cosine_kdecay",
    "lr_exp_kdecay",
    "lr_baseline",
    "evaluate",
    "derivative_increment_schedule",
    "polynomial_kth_derivative",
    "sample_curve",
    "schedule_to_dict",
    "schedule_from_dict",
    "FAMILY_NAMES",
]


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class KDecayParams:
    """The (eta0, eta_e, T0, k) tuple every schedule is parameterized by.

    Attributes:
        eta0: Initial (maximum) learning rate.
        eta_e: Final (minimum) learning rate.
        t0: Total schedule horizon, in schedule-time units.
        k: Decay order; real-valued, ``k >= 1``. Ignored by baseline
            families.
    """

    eta0: float
    eta_e: float
    t0: float
    k: float = 1.0

    def __post_init__(self):
        for name in ("eta0", "eta_e", "t0", "k"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if self.eta_e < 0.0:
            raise DomainError(f"eta_e must be >= 0, got {self.eta_e}")
        if self.eta0 <= self.eta_e:
            raise DomainError(f"eta0 must exceed eta_e, got eta0={self.eta0}, eta_e={self.eta_e}")
        if self.t0 <= 0.0:
            raise DomainError(f"t0 must be positive, got {self.t0}")
        if self.k < 1.0:
            raise DomainError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class PolynomialKDecay:
    """Base schedule (eta0 - eta_e) * (1 - t/T0)**n + eta_e, plus the k-decay term."""

    n: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "n", _require_finite("n", self.n))
        if self.n <= 0.0:
            raise DomainError(f"polynomial power n must be positive, got {self.n}")


@dataclass(frozen=True)
class CosineKDecay:
    """Half-cosine decay from eta0 to eta_e, plus the k-decay term."""


@dataclass(frozen=True)
class ExpKDecay:
    """Base schedule (eta0 - eta_e) * exp(-t/T0), plus the k-decay term.

    Note the base has no additive ``eta_e``, so the raw value at ``t = T0``
    is ``(eta0 - eta_e) / e``; the clamp governs the floor.
    """


@dataclass(frozen=True)
class StepDecay:
    """Piecewise-constant: eta0 * gamma**(number of milestones <= t)."""

    milestones: tuple[float, ...]
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "milestones", tuple(float(m) for m in self.milestones))
        object.__setattr__(self, "gamma", _require_finite("gamma", self.gamma))
        if not 0.0 < self.gamma < 1.0:
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma}")
        for a, b in zip(self.milestones, self.milestones[1:]):
            if not a < b:
                raise DomainError(f"milestones must be strictly ascending, got {self.milestones}")


@dataclass(frozen=True)
class Sgdr:
    """Cosine decay restarted every period; each period is period_mult times longer."""

    period0: float
    period_mult: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "period0", _require_finite("period0", self.period0))
        object.__setattr__(self, "period_mult", _require_finite("period_mult", self.period_mult))
        if self.period0 <= 0.0:
            raise DomainError(f"period0 must be positive, got {self.period0}")
        if self.period_mult < 1.0:
            raise DomainError(f"period_mult must be >= 1, got {self.period_mult}")


@dataclass(frozen=True)
class Clr:
    """Symmetric triangular wave between eta_e and eta0, peaking every 2 * half_cycle."""

    half_cycle: float

    def __post_init__(self):
        object.__setattr__(self, "half_cycle", _require_finite("half_cycle", self.half_cycle))
        if self.half_cycle <= 0.0:
            raise DomainError(f"half_cycle must be positive, got {self.half_cycle}")


@dataclass(frozen=True)
class Htd:
    """Tanh ramp: eta_e + (eta0 - eta_e)/2 * (1 - tanh(L + (U - L) * t/T0))."""

    lower: float = -6.0
    upper: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "lower", _require_finite("lower", self.lower))
        object.__setattr__(self, "upper", _require_finite("upper", self.upper))
        if not self.lower < self.upper:
            raise DomainError(f"require lower < upper, got ({self.lower}, {self.upper})")


Family = Union[PolynomialKDecay, CosineKDecay, ExpKDecay, StepDecay, Sgdr, Clr, Htd]

_KDECAY_FAMILIES = (PolynomialKDecay, CosineKDecay, ExpKDecay)
_BASELINE_FAMILIES = (StepDecay, Sgdr, Clr, Htd)


@dataclass(frozen=True)
class ScheduleSpec:
    """An immutable, fully evaluable description of one LR schedule."""

    family: Family
    params: KDecayParams
    clamp: bool = True

    def __post_init__(self):
        if not isinstance(self.family, _KDECAY_FAMILIES + _BASELINE_FAMILIES):
            raise DomainError(f"unknown schedule family {type(self.family).__name__}")
        if isinstance(self.family, StepDecay):
            for m in self.family.milestones:
                if not 0.0 < m < self.params.t0:
                    raise DomainError(
                        f"milestone {m} outside (0, {self.params.t0})"
                    )


class CurveSample(NamedTuple):
    t: float
    lr: float


def _check_time(p: KDecayParams, t: float) -> float:
    t = float(t)
    if not math.isfinite(t):
        raise DomainError(f"t must be finite, got {t!r}")
    if not 0.0 <= t <= p.t0:
        raise DomainError(f"t={t} outside schedule horizon [0, {p.t0}]")
    return t


def _clamped(spec: ScheduleSpec, raw: float) -> float:
    if not spec.clamp:
        return raw
    return min(spec.params.eta0, max(spec.params.eta_e, raw))


def kdecay_term(p: KDecayParams, t: float) -> float:
    """The additive k-decay term (eta0 - eta_e) * ((t/T0)**k - t/T0).

    Zero at both endpoints and identically zero at ``k = 1``; strictly
    negative on the open interval for ``k > 1``.
    """
    t = _check_time(p, t)
    s = t / p.t0
    return (p.eta0 - p.eta_e) * (s**p.k - s)


def lr_polynomial_kdecay(spec: ScheduleSpec, t: float) -> float:
    """Polynomial decay of power ``n`` with the k-decay term.

    raw(t) = (eta0 - eta_e) * (1 - t/T0)**n + eta_e + kdecay_term(t)
    """
    fam = spec.family
    if not isinstance(fam, PolynomialKDecay):
        raise DomainError(f"spec family is {type(fam).__name__}, not PolynomialKDecay")
    p = spec.params
    t = _check_time(p, t)
    s = t / p.t0
    raw = (p.eta0 - p.eta_e) * (1.0 - s) ** fam.n + p.eta_e + kdecay_term(p, t)
    return _clamped(spec, raw)


def lr_cosine_kdecay(spec: ScheduleSpec, t: float) -> float:
    """Half-cosine decay with the k-decay term.

    raw(t) = (eta0 - eta_e)/2 * (1 + cos(pi * t/T0)) + eta_e + kdecay_term(t)
    """
    if not isinstance(spec.family, CosineKDecay):
        raise DomainError(f"spec family is {type(spec.family).__name__}, not CosineKDecay")
    p = spec.params
    t = _check_time(p, t)
    s = t / p.t0
    raw = 0.5 * (p.eta0 - p.eta_e) * (1.0 + math.cos(math.pi * s)) + p.eta_e + kdecay_term(p, t)
    return _clamped(spec, raw)


def lr_exp_kdecay(spec: ScheduleSpec, t: float) -> float:
    """Exponential decay with the k-decay term.

    raw(t) = (eta0 - eta_e) * exp(-t/T0) + kdecay_term(t)

    There is deliberately no additive ``eta_e`` in the base, so
    ``raw(0) = eta0 - eta_e``; the clamp supplies the floor.
    """
    if not isinstance(spec.family, ExpKDecay):
        raise DomainError(f"spec family is {type(spec.family).__name__}, not ExpKDecay")
    p = spec.params
    t = _check_time(p, t)
    s = t / p.t0
    raw = (p.eta0 - p.eta_e) * math.exp(-s) + kdecay_term(p, t)
    return _clamped(spec, raw)


def lr_baseline(spec: ScheduleSpec, t: float) -> float:
    """Evaluate one of the comparison baselines (StepDecay, Sgdr, Clr, Htd)."""
    fam = spec.family
    p = spec.params
    t = _check_time(p, t)
    if isinstance(fam, StepDecay):
        raw = p.eta0 * fam.gamma ** bisect_right(fam.milestones, t)
    elif isinstance(fam, Sgdr):
        period = fam.period0
        phase = t
        # A boundary hit belongs to the period it finishes, so a single
        # period of length T0 degenerates to plain cosine decay.
        while phase > period:
            phase -= period
            period *= fam.period_mult
        raw = p.eta_e + 0.5 * (p.eta0 - p.eta_e) * (1.0 + math.cos(math.pi * phase / period))
    elif isinstance(fam, Clr):
        cycle = math.floor(1.0 + t / (2.0 * fam.half_cycle))
        x = abs(t / fam.half_cycle - 2.0 * cycle + 1.0)
        raw = p.eta_e + (p.eta0 - p.eta_e) * max(0.0, 1.0 - x)
    elif isinstance(fam, Htd):
        s = t / p.t0
        raw = p.eta_e + 0.5 * (p.eta0 - p.eta_e) * (
            1.0 - math.tanh(fam.lower + (fam.upper - fam.lower) * s)
        )
    else:
        raise DomainError(f"spec family {type(fam).__name__} is not a baseline")
    return _clamped(spec, raw)


def evaluate(spec: ScheduleSpec, t: float) -> float:
    """Evaluate any schedule spec at time ``t``."""
    fam = spec.family
    if isinstance(fam, PolynomialKDecay):
        return lr_polynomial_kdecay(spec, t)
    if isinstance(fam, CosineKDecay):
        return lr_cosine_kdecay(spec, t)
    if isinstance(fam, ExpKDecay):
        return lr_exp_kdecay(spec, t)
    return lr_baseline(spec, t)


def _require_integer_order(k: float) -> int:
    if isinstance(k, bool) or (not isinstance(k, int) and not float(k).is_integer()):
        raise DomainError(f"derivative order k must be a positive integer, got {k!r}")
    k = int(k)
    if k < 1:
        raise DomainError(f"derivative order k must be >= 1, got {k}")
    return k


def derivative_increment_schedule(spec: ScheduleSpec, k: int, alpha0: float, t: float) -> float:
    """Base schedule plus a constant increment alpha0 on its k-th derivative.

    Integrating a constant addition to the k-th derivative (with zero added
    boundary terms) gives ``base(t) + alpha0 * t**k / k!``. Unlike the
    k-decay term, this construction only holds for integer orders. The
    spec's clamp option applies to the summed value.
    """
    k = _require_integer_order(k)
    alpha0 = _require_finite("alpha0", alpha0)
    t = _check_time(spec.params, t)
    base = evaluate(replace(spec, clamp=False), t)
    raw = base + alpha0 * t**k / math.factorial(k)
    return _clamped(spec, raw)


def polynomial_kth_derivative(eta0: float, eta_e: float, t0: float, n: float, k: int) -> float:
    """The k-th derivative of (eta0 - eta_e) * (1 - t/T0)**n + eta_e at n = k.

    Only at ``n = k`` is the derivative constant in time; its value is
    ``(eta0 - eta_e) * k! * (-1/T0)**k``. Any other ``n`` is rejected.
    """
    k = _require_integer_order(k)
    eta0 = _require_finite("eta0", eta0)
    eta_e = _require_finite("eta_e", eta_e)
    t0 = _require_finite("t0", t0)
    n = _require_finite("n", n)
    if t0 <= 0.0:
        raise DomainError(f"t0 must be positive, got {t0}")
    if n != k:
        raise UnsupportedCaseError(
            f"k-th derivative is constant in time only at n = k, got n={n}, k={k}"
        )
    return (eta0 - eta_e) * math.factorial(k) * (-1.0 / t0) ** k


FAMILY_NAMES = ("pol", "cos", "exp", "step", "sgdr", "clr", "htd")

_FAMILY_EXTRA_KEYS = {
    "pol": ("n",),
    "cos": (),
    "exp": (),
    "step": ("milestones", "gamma"),
    "sgdr": ("period0", "period_mult"),
    "clr": ("half_cycle",),
    "htd": ("lower", "upper"),
}


def _family_name(family: Family) -> str:
    return {
        PolynomialKDecay: "pol",
        CosineKDecay: "cos",
        ExpKDecay: "exp",
        StepDecay: "step",
        Sgdr: "sgdr",
        Clr: "clr",
        Htd: "htd",
    }[type(family)]


def schedule_to_dict(spec: ScheduleSpec) -> dict:
    """Serialize a spec to the flat dict used by config files and reports."""
    name = _family_name(spec.family)
    out = {
        "family": name,
        "eta0": spec.params.eta0,
        "eta_e": spec.params.eta_e,
        "t0": spec.params.t0,
        "k": spec.params.k,
        "clamp": spec.clamp,
    }
    fam = spec.family
    if isinstance(fam, PolynomialKDecay):
        out["n"] = fam.n
    elif isinstance(fam, StepDecay):
        out["milestones"] = list(fam.milestones)
        out["gamma"] = fam.gamma
    elif isinstance(fam, Sgdr):
        out["period0"] = fam.period0
        out["period_mult"] = fam.period_mult
    elif isinstance(fam, Clr):
        out["half_cycle"] = fam.half_cycle
    elif isinstance(fam, Htd):
        out["lower"] = fam.lower
        out["upper"] = fam.upper
    return out


def schedule_from_dict(data: dict, *, t0: float | None = None, k: float | None = None) -> ScheduleSpec:
    """Build a spec from its dict form; ``t0`` and ``k`` override dict entries.

    ``t0`` may be omitted from the dict (it is usually derived from the
    training protocol) as long as the override supplies it. Omitted keys fall
    back to the protocol defaults eta0=0.1, eta_e=0.001, k=1.5. Unknown keys
    are rejected to catch typos early.
    """
    if not isinstance(data, dict):
        raise ConfigError(f"schedule section must be a mapping, got {type(data).__name__}", "schedule")
    data = dict(data)
    name = data.pop("family", None)
    if name not in FAMILY_NAMES:
        raise ConfigError(
            f"schedule.family must be one of {FAMILY_NAMES}, got {name!r}", "schedule.family"
        )
    file_t0 = data.pop("t0", None)
    if t0 is None:
        t0 = file_t0
        if t0 is None:
            raise ConfigError("schedule.t0 missing and no horizon supplied", "schedule.t0")
    elif file_t0 is not None and float(file_t0) != float(t0):
        raise ConfigError(
            f"schedule.t0={file_t0} conflicts with the derived horizon {t0}", "schedule.t0"
        )
    if k is None:
        k = data.pop("k", 1.5)
    else:
        data.pop("k", None)

    eta0 = data.pop("eta0", 0.1)
    eta_e = data.pop("eta_e", 0.001)
    clamp = data.pop("clamp", True)
    if not isinstance(clamp, bool):
        raise ConfigError(f"schedule.clamp must be a boolean, got {clamp!r}", "schedule.clamp")

    extras = {key: data.pop(key) for key in _FAMILY_EXTRA_KEYS[name] if key in data}
    if data:
        raise ConfigError(
            f"unknown schedule key(s) for family {name!r}: {sorted(data)}", "schedule"
        )

    if name == "pol":
        family: Family = PolynomialKDecay(n=extras.get("n", 1.0))
    elif name == "cos":
        family = CosineKDecay()
    elif name == "exp":
        family = ExpKDecay()
    elif name == "step":
        if "milestones" not in extras or "gamma" not in extras:
            raise ConfigError("step decay needs schedule.milestones and schedule.gamma", "schedule")
        family = StepDecay(tuple(extras["milestones"]), extras["gamma"])
    elif name == "sgdr":
        if "period0" not in extras:
            raise ConfigError("sgdr needs schedule.period0", "schedule.period0")
        family = Sgdr(extras["period0"], extras.get("period_mult", 1.0))
    elif name == "clr":
        if "half_cycle" not in extras:
            raise ConfigError("clr needs schedule.half_cycle", "schedule.half_cycle")
        family = Clr(extras["half_cycle"])
    else:
        family = Htd(extras.get("lower", -6.0), extras.get("upper", 3.0))

    return ScheduleSpec(family, KDecayParams(eta0, eta_e, t0, k), clamp=clamp)


def sample_curve(spec: ScheduleSpec, num_points: int) -> list[CurveSample]:
    """Sample the schedule at ``num_points`` evenly spaced times in [0, T0].

    Endpoints are always included; spacing is ``T0 / (num_points - 1)``.
    """
    if not isinstance(num_points, int) or isinstance(num_points, bool) or num_points < 2:
        raise DomainError(f"num_points must be an integer >= 2, got {num_points!r}")
    t0 = spec.params.t0
    denom = num_points - 1
    samples = []
    for i in range(num_points):
        t = t0 * (i / denom)
        samples.append(CurveSample(t, evaluate(spec, t)))
    return samples
