#!/usr/bin/env python3
"""Sweep k over the POL schedule on two-spirals and inspect the ordering.

Reproduces the qualitative claims the library is built to study: the loss
curve of a larger k sits above that of a smaller k through the middle of
training, and the final-error-vs-k profile has a well-defined argmin.
Cells are flushed incrementally, so interrupting and rerunning this script
resumes where it left off.
"""

import statistics

from kdecay import DatasetSpec, ModelSpec, ScheduleTemplate, SweepPlan
from kdecay.reporting import read_run_report
from kdecay.sweep import best_k, compare_loss_ordering, run_sweep

K_VALUES = (1.0, 1.5, 2.0, 3.0)
SEEDS = (1, 2, 3)

plan = SweepPlan(
    schedules=(ScheduleTemplate("pol", {"family": "pol", "n": 1.0}),),
    k_values=K_VALUES,
    seeds=SEEDS,
    epochs=60,
    batch_size=128,
    momentum=0.9,
    dataset=DatasetSpec("two_spirals", 2000, 2, 0.08, seed=11),
    model=ModelSpec(hidden=(64, 64), activation="relu"),
    out_dir="demo_output/k_sweep",
)

print(f"running {plan.num_cells()} cells (resume-aware) ...")
result = run_sweep(plan, resume=True)

print("\nfinal test error by k (median [min, max] over seeds):")
for k in K_VALUES:
    agg = result.aggregates[("pol", k)]
    print(f"  k={k:3g}: {agg.median_err:.4f}  [{agg.min_err:.4f}, {agg.max_err:.4f}]  diverged={agg.n_diverged}")

k_star, err_star = best_k(result, "pol")
print(f"best_k -> k={k_star:g} with median error {err_star:.4f}")

print("\nloss-curve ordering on the middle 60% of training (fraction of epochs")
print("where the larger-k loss is at least the smaller-k loss; 1.0 = always above):")
for k in K_VALUES[1:]:
    fracs = []
    for seed in SEEDS:
        hi = read_run_report(result.cells[("pol", k, seed)].record_path)
        lo = read_run_report(result.cells[("pol", 1.0, seed)].record_path)
        [ordering] = compare_loss_ordering([(1.0, lo), (k, hi)], window=(0.2, 0.8))
        fracs.append(ordering.fraction)
    print(f"  k={k:3g} vs k=1: per-seed {[round(f, 2) for f in fracs]}, median {statistics.median(fracs):.2f}")
