"""Built-in invariant suite behind the ``check`` subcommand.

Each check recomputes an analytic property through an independent route
(inline base formulas, finite differences, randomized clamp probing) and
compares against the library's evaluators. Calls go through the module
objects, not imported names, so a faulty build surfaces here no matter how
the fault was introduced.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from . import network, schedules

__all__ = ["CheckResult", "run_self_checks", "CHECKS"]

ETA0, ETA_E, T0 = 0.1, 0.001, 100.0
GRID = [T0 * i / 1000.0 for i in range(1001)]


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def _pol(k, n, clamp=False):
    return schedules.ScheduleSpec(
        schedules.PolynomialKDecay(n=n), schedules.KDecayParams(ETA0, ETA_E, T0, k), clamp=clamp
    )


def _cos(k, clamp=False):
    return schedules.ScheduleSpec(
        schedules.CosineKDecay(), schedules.KDecayParams(ETA0, ETA_E, T0, k), clamp=clamp
    )


def _exp(k, clamp=False):
    return schedules.ScheduleSpec(
        schedules.ExpKDecay(), schedules.KDecayParams(ETA0, ETA_E, T0, k), clamp=clamp
    )


def check_endpoint_exactness() -> CheckResult:
    """POL and COS hit eta0 at t=0 and eta_e at t=T0 to 1e-12, unclamped."""
    worst = 0.0
    for k in (1.0, 1.5, 2.0, 3.0, 5.0):
        specs = [_pol(k, n) for n in (0.5, 1.0, 2.0)] + [_cos(k)]
        for spec in specs:
            worst = max(worst, abs(schedules.evaluate(spec, 0.0) - ETA0))
            worst = max(worst, abs(schedules.evaluate(spec, T0) - ETA_E))
    return CheckResult("endpoint_exactness", worst <= 1e-12, f"max endpoint deviation {worst:.3e} (tol 1e-12)")


def check_k1_reduction() -> CheckResult:
    """At k=1 each k-decay family equals its base schedule on a 1001-point grid."""
    d = ETA0 - ETA_E
    cases: list[tuple[object, Callable[[float], float]]] = [
        (_pol(1.0, 0.5), lambda s: d * (1.0 - s) ** 0.5 + ETA_E),
        (_pol(1.0, 1.0), lambda s: d * (1.0 - s) + ETA_E),
        (_pol(1.0, 2.0), lambda s: d * (1.0 - s) ** 2 + ETA_E),
        (_cos(1.0), lambda s: 0.5 * d * (1.0 + math.cos(math.pi * s)) + ETA_E),
        (_exp(1.0), lambda s: d * math.exp(-s)),
    ]
    worst = 0.0
    for spec, base in cases:
        for t in GRID:
            worst = max(worst, abs(schedules.evaluate(spec, t) - base(t / T0)))
    return CheckResult("k1_reduction", worst <= 1e-12, f"sup |k=1 - base| = {worst:.3e} (tol 1e-12)")


def check_term_sign() -> CheckResult:
    """The k-decay term is negative on (0, T0) for k>1 and zero at k=1 and endpoints."""
    interior = GRID[1:-1]
    worst_interior = -math.inf
    for k in (1.5, 2.0, 5.0):
        p = schedules.KDecayParams(ETA0, ETA_E, T0, k)
        worst_interior = max(worst_interior, max(schedules.kdecay_term(p, t) for t in interior))
    p1 = schedules.KDecayParams(ETA0, ETA_E, T0, 1.0)
    k1_max = max(abs(schedules.kdecay_term(p1, t)) for t in GRID)
    endpoint_max = max(
        abs(schedules.kdecay_term(schedules.KDecayParams(ETA0, ETA_E, T0, k), t))
        for k in (1.0, 2.0, 5.0)
        for t in (0.0, T0)
    )
    passed = worst_interior < 0.0 and k1_max == 0.0 and endpoint_max <= 1e-15
    return CheckResult(
        "term_sign",
        passed,
        f"max interior term {worst_interior:.3e} (must be < 0), k=1 max |term| {k1_max:.1e}",
    )


def check_polynomial_identity() -> CheckResult:
    """POL(N=1, k=2) coincides with POL(N=2, k=1) pointwise."""
    a, b = _pol(2.0, 1.0), _pol(1.0, 2.0)
    worst = max(abs(schedules.evaluate(a, t) - schedules.evaluate(b, t)) for t in GRID)
    return CheckResult("polynomial_identity", worst <= 1e-12, f"sup difference {worst:.3e} (tol 1e-12)")


def check_derivative_constancy() -> CheckResult:
    """Central k-th differences of the base polynomial at n=k match the closed form."""
    h = T0 / 1e4
    worst = 0.0
    for k in (1, 2, 3):
        spec = _pol(1.0, float(k))
        f = lambda t: schedules.evaluate(spec, t)
        expected = schedules.polynomial_kth_derivative(ETA0, ETA_E, T0, k, k)
        for t in (25.0, 50.0, 75.0):
            if k == 1:
                fd = (f(t + h) - f(t - h)) / (2.0 * h)
            elif k == 2:
                fd = (f(t + h) - 2.0 * f(t) + f(t - h)) / h**2
            else:
                fd = (f(t + 2 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2 * h)) / (2.0 * h**3)
            worst = max(worst, abs(fd - expected) / abs(expected))
    return CheckResult("derivative_constancy", worst <= 1e-4, f"max relative error {worst:.3e} (tol 1e-4)")


def check_clamp_guarantee() -> CheckResult:
    """Clamped outputs stay in [eta_e, eta0]; the raw COS k=2 curve dips below eta_e."""
    rng = np.random.default_rng(7)
    makers = (lambda k: _pol(k, float(rng.uniform(0.5, 3.0)), clamp=True),
              lambda k: _cos(k, clamp=True),
              lambda k: _exp(k, clamp=True))
    worst_low, worst_high = math.inf, -math.inf
    for _ in range(20000):
        k = float(rng.uniform(1.0, 5.0))
        t = float(rng.uniform(0.0, T0))
        spec = makers[int(rng.integers(0, 3))](k)
        lr = schedules.evaluate(spec, t)
        worst_low = min(worst_low, lr)
        worst_high = max(worst_high, lr)
    in_range = ETA_E <= worst_low and worst_high <= ETA0
    dip = schedules.evaluate(_cos(2.0, clamp=False), 0.75 * T0)
    passed = in_range and dip < ETA_E
    return CheckResult(
        "clamp_guarantee",
        passed,
        f"clamped range [{worst_low:.6f}, {worst_high:.6f}], raw cos k=2 dip {dip:.6f} < eta_e",
    )


def check_gradient_correctness() -> CheckResult:
    """Analytic backprop matches central finite differences on sampled coordinates."""
    cases = [((2, 6, 3), "tanh", 101), ((4, 8, 8, 3), "tanh", 102), ((3, 10, 2), "relu", 103)]
    worst = 0.0
    for dims, activation, seed in cases:
        rng = np.random.default_rng(seed)
        model = network.init_mlp(dims, activation=activation, seed=seed)
        x = rng.standard_normal((16, dims[0]))
        y = rng.integers(0, dims[-1], size=16)
        worst = max(worst, network.gradient_check(model, x, y, num_checks=40, seed=seed))
    return CheckResult("gradient_check", worst <= 1e-4, f"max relative error {worst:.3e} (tol 1e-4)")


CHECKS = (
    check_endpoint_exactness,
    check_k1_reduction,
    check_term_sign,
    check_polynomial_identity,
    check_derivative_constancy,
    check_clamp_guarantee,
    check_gradient_correctness,
)


def run_self_checks() -> list[CheckResult]:
    return [check() for check in CHECKS]
