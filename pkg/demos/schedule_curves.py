#!/usr/bin/env python3
"""Sample every schedule family and show how k reshapes the decay.

Writes one CSV per curve into demo_output/curves/ (plot them with any
external tool) and prints a small comparison table, including the raw
sub-floor dip that motivates the default clamp.
"""

from pathlib import Path

from kdecay import (
    Clr,
    CosineKDecay,
    ExpKDecay,
    Htd,
    KDecayParams,
    PolynomialKDecay,
    ScheduleSpec,
    Sgdr,
    StepDecay,
    evaluate,
    sample_curve,
)
from kdecay.reporting import write_curve_csv

OUT = Path("demo_output/curves")
ETA0, ETA_E, T0 = 0.1, 0.001, 100.0

print("=" * 72)
print("k-decay schedule curves (eta0=0.1, eta_e=0.001, T0=100)")
print("=" * 72)

curves = {}
for k in (1.0, 1.5, 2.0, 3.0):
    curves[f"pol_n1_k{k:g}"] = ScheduleSpec(PolynomialKDecay(1.0), KDecayParams(ETA0, ETA_E, T0, k))
    curves[f"cos_k{k:g}"] = ScheduleSpec(CosineKDecay(), KDecayParams(ETA0, ETA_E, T0, k))
    curves[f"exp_k{k:g}"] = ScheduleSpec(ExpKDecay(), KDecayParams(ETA0, ETA_E, T0, k))

curves["step_60_120"] = ScheduleSpec(
    StepDecay(milestones=(60.0, 80.0), gamma=0.1), KDecayParams(ETA0, ETA_E, T0)
)
curves["sgdr_p40_mult2"] = ScheduleSpec(Sgdr(period0=40.0, period_mult=2.0), KDecayParams(ETA0, ETA_E, T0))
curves["clr_half25"] = ScheduleSpec(Clr(half_cycle=25.0), KDecayParams(ETA0, ETA_E, T0))
curves["htd_default"] = ScheduleSpec(Htd(), KDecayParams(ETA0, ETA_E, T0))

for name, spec in curves.items():
    write_curve_csv(OUT / f"{name}.csv", sample_curve(spec, 201))
print(f"wrote {len(curves)} curve CSVs to {OUT}/")

print("\nLR at a few times (clamped, the default):")
header = "t/T0   " + "  ".join(f"{name:>12s}" for name in ("pol k=1", "pol k=2", "pol k=3", "cos k=2"))
print(header)
specs = [curves["pol_n1_k1"], curves["pol_n1_k2"], curves["pol_n1_k3"], curves["cos_k2"]]
for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
    row = [f"{evaluate(s, frac * T0):12.6f}" for s in specs]
    print(f"{frac:4.2f}   " + "  ".join(row))

print("\nWhy the clamp defaults on: raw COS k=2 dips below eta_e late in training")
raw = ScheduleSpec(CosineKDecay(), KDecayParams(ETA0, ETA_E, T0, 2.0), clamp=False)
for frac in (0.7, 0.75, 0.8, 0.9):
    print(f"  raw lr({frac:0.2f}*T0) = {evaluate(raw, frac * T0):+.6f}")
print(f"  clamped value at 0.75*T0 = {evaluate(curves['cos_k2'], 0.75 * T0):.6f}")
