#!/usr/bin/env python3
"""Walk through the machinery behind the additive k-decay term.

Shows (1) the term itself and its sign/endpoint structure, (2) schedules
built by adding a constant increment to a k-th derivative, and (3) the
closed-form k-th derivative of the base polynomial verified against
central finite differences.
"""

import math

from kdecay import (
    KDecayParams,
    PolynomialKDecay,
    ScheduleSpec,
    derivative_increment_schedule,
    evaluate,
    kdecay_term,
    polynomial_kth_derivative,
)

ETA0, ETA_E, T0 = 0.1, 0.001, 100.0

print("=" * 72)
print("1. The additive term (eta0 - eta_e) * ((t/T0)^k - t/T0)")
print("=" * 72)
print("t/T0:   " + "  ".join(f"{f:8.2f}" for f in (0.0, 0.25, 0.5, 0.75, 1.0)))
for k in (1.0, 1.5, 2.0, 5.0):
    p = KDecayParams(ETA0, ETA_E, T0, k)
    values = [kdecay_term(p, f * T0) for f in (0.0, 0.25, 0.5, 0.75, 1.0)]
    print(f"k={k:3g}:  " + "  ".join(f"{v:8.5f}" for v in values))
print("-> zero at both endpoints, identically zero at k=1, negative inside for k>1")

print()
print("=" * 72)
print("2. Adding a constant increment alpha0 to the k-th derivative")
print("=" * 72)
base = ScheduleSpec(PolynomialKDecay(0.5), KDecayParams(ETA0, ETA_E, T0, 1.0), clamp=False)
for alpha0 in (0.0, 1e-6, 5e-6):
    values = [derivative_increment_schedule(base, 1, alpha0, f * T0) for f in (0.0, 0.5, 1.0)]
    print(f"alpha0={alpha0:.0e}: lr at t/T0 in (0, 0.5, 1) = " + ", ".join(f"{v:.6f}" for v in values))
print("-> the increment tilts the whole curve by alpha0 * t (first order)")

print()
print("=" * 72)
print("3. k-th derivative of the base polynomial is constant at n = k")
print("=" * 72)
h = T0 / 1e4
for k in (1, 2, 3):
    spec = ScheduleSpec(PolynomialKDecay(float(k)), KDecayParams(ETA0, ETA_E, T0, 1.0), clamp=False)
    f = lambda t: evaluate(spec, t)
    closed = polynomial_kth_derivative(ETA0, ETA_E, T0, k, k)
    t = 37.5
    if k == 1:
        fd = (f(t + h) - f(t - h)) / (2 * h)
    elif k == 2:
        fd = (f(t + h) - 2 * f(t) + f(t - h)) / h**2
    else:
        fd = (f(t + 2 * h) - 2 * f(t + h) + 2 * f(t - h) - f(t - 2 * h)) / (2 * h**3)
    rel = abs(fd - closed) / abs(closed)
    print(f"k={k}: closed form {closed:+.3e}, central difference {fd:+.3e}, rel err {rel:.1e}")
print(f"-> equals (eta0 - eta_e) * k! * (-1/T0)^k; e.g. k=2: {0.099 * math.factorial(2) / T0**2:+.3e}")
