#!/usr/bin/env python3
"""Train one MLP on the two-spirals task with a k-decay schedule.

Narrates per-epoch progress and writes the json-lines run report to
demo_output/. Rerunning produces byte-identical output: everything is
seeded.
"""

from pathlib import Path

from kdecay import (
    KDecayParams,
    PolynomialKDecay,
    ScheduleSpec,
    TrainConfig,
    expected_horizon,
    init_mlp,
    make_synthetic_dataset,
    train,
)
from kdecay.reporting import write_run_report

EPOCHS, BATCH, SEED, K = 60, 128, 1, 1.5

print("two-spirals training run (POL schedule, k = %.1f)" % K)
dataset = make_synthetic_dataset("two_spirals", 2000, 2, noise=0.08, seed=11)
print(f"dataset: {dataset.inputs.shape[0]} samples, train={dataset.train_idx.size}, test={dataset.test_idx.size}")

t0 = expected_horizon(dataset.train_idx.size, BATCH, EPOCHS)
schedule = ScheduleSpec(PolynomialKDecay(1.0), KDecayParams(0.1, 0.001, float(t0), K))
model = init_mlp((2, 64, 64, 2), activation="relu", seed=SEED)
config = TrainConfig(schedule, epochs=EPOCHS, batch_size=BATCH, momentum=0.9, seed=SEED)
print(f"schedule horizon T0 = {t0} batches ({EPOCHS} epochs x {t0 // EPOCHS} batches)")

record = train(model, dataset, config)

print("\nepoch  mean_train_loss  test_error      lr range this epoch")
per_epoch = t0 // EPOCHS
for e in record.epochs:
    if e.epoch % 6 != 0 and e.epoch != EPOCHS - 1:
        continue
    lrs = [s.lr for s in record.steps[e.epoch * per_epoch : (e.epoch + 1) * per_epoch]]
    print(f"{e.epoch:5d}  {e.mean_train_loss:15.4f}  {e.test_error:10.4f}      [{min(lrs):.5f}, {max(lrs):.5f}]")

print(f"\nfinal test error: {record.final_test_error:.4f} ({record.wall_time_s:.2f}s)")
out = Path("demo_output/two_spirals_run.jsonl")
write_run_report(out, record)
print(f"report written to {out}")
