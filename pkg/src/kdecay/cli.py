"""Command-line surface: curve, train, sweep, and check subcommands.

Exit codes: 0 on success (including a completed run that diverged, which is
still a successful report), 1 when ``check`` finds a failing property, 2 for
configuration, domain, and I/O errors. Every error prints a single
``error[<code>]: ...`` line to stderr. No environment variable affects any
numeric result; all randomness comes from explicit seeds.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from .config import load_sweep_config, load_train_config
from .errors import ConfigError, DomainError
from .reporting import run_report_text, write_curve_csv, write_run_report
from .schedules import FAMILY_NAMES, sample_curve, schedule_from_dict
from .selfcheck import run_self_checks
from .sweep import best_k, run_sweep
from .training import train

_FIELD_FLAGS = {
    "family": "--family",
    "eta0": "--eta0",
    "eta_e": "--etae",
    "t0": "--t0",
    "k": "--k",
    "n": "--n",
    "milestones": "--milestones",
    "gamma": "--gamma",
    "period0": "--period0",
    "period_mult": "--period-mult",
    "half_cycle": "--half-cycle",
    "lower": "--lower",
    "upper": "--upper",
    "clamp": "--no-clamp",
}


def _offending_flag(message: str) -> str | None:
    # quoted tokens (as in "unknown schedule key(s): ['n']") are the most specific
    for field in sorted(_FIELD_FLAGS, key=len, reverse=True):
        if f"'{field}'" in message:
            return _FIELD_FLAGS[field]
    for field in sorted(_FIELD_FLAGS, key=len, reverse=True):
        if re.search(rf"\b{re.escape(field)}\b", message):
            return _FIELD_FLAGS[field]
    return None


def _fail(code: str, message: str) -> int:
    print(f"error[{code}]: {message}", file=sys.stderr)
    return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdecay",
        description="k-decay learning-rate schedules: curves, training runs, k-sweeps, self-checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    curve = sub.add_parser("curve", help="sample a schedule into a t,lr CSV")
    curve.add_argument("--family", required=True, choices=FAMILY_NAMES)
    curve.add_argument("--eta0", type=float, help="initial LR (default 0.1)")
    curve.add_argument("--etae", type=float, help="final LR (default 0.001)")
    curve.add_argument("--t0", type=float, default=100.0, help="schedule horizon (default 100)")
    curve.add_argument("--k", type=float, help="decay order, >= 1 (default 1.5)")
    curve.add_argument("--n", type=float, help="polynomial power (pol only)")
    curve.add_argument("--milestones", help="comma-separated times (step only)")
    curve.add_argument("--gamma", type=float, help="step decay factor in (0,1)")
    curve.add_argument("--period0", type=float, help="first restart period (sgdr only)")
    curve.add_argument("--period-mult", dest="period_mult", type=float, help="period growth (sgdr)")
    curve.add_argument("--half-cycle", dest="half_cycle", type=float, help="triangle half cycle (clr)")
    curve.add_argument("--lower", type=float, help="tanh ramp lower bound (htd)")
    curve.add_argument("--upper", type=float, help="tanh ramp upper bound (htd)")
    curve.add_argument("--no-clamp", action="store_true", help="emit raw values outside [etae, eta0]")
    curve.add_argument("--points", type=int, default=101)
    curve.add_argument("--out", help="output CSV path (stdout when omitted)")

    tr = sub.add_parser("train", help="run one training from a config file")
    tr.add_argument("--config", required=True, help="JSON run config")
    tr.add_argument("--out", help="write the json-lines run report here")
    tr.add_argument("--timings", action="store_true", help="include wall_time_s in the report")

    sw = sub.add_parser("sweep", help="run a (schedule x k x seed) sweep from a plan file")
    sw.add_argument("--plan", required=True, help="JSON sweep plan")
    sw.add_argument("--out", required=True, help="output directory for cell files and aggregate.csv")
    sw.add_argument("--resume", action="store_true", help="skip cells whose report files exist")
    sw.add_argument("--timings", action="store_true", help="include wall_time_s in cell reports")

    sub.add_parser("check", help="run the embedded invariant suite")
    return parser


def cmd_curve(args) -> int:
    section = {"family": args.family, "t0": args.t0}
    optional = {
        "eta0": args.eta0,
        "eta_e": args.etae,
        "k": args.k,
        "n": args.n,
        "gamma": args.gamma,
        "period0": args.period0,
        "period_mult": args.period_mult,
        "half_cycle": args.half_cycle,
        "lower": args.lower,
        "upper": args.upper,
    }
    section.update({key: value for key, value in optional.items() if value is not None})
    if args.milestones is not None:
        try:
            section["milestones"] = [float(m) for m in args.milestones.split(",") if m.strip()]
        except ValueError:
            return _fail("domain", f"--milestones must be comma-separated numbers, got {args.milestones!r}")
    if args.no_clamp:
        section["clamp"] = False

    try:
        spec = schedule_from_dict(section)
        samples = sample_curve(spec, args.points)
    except (ConfigError, DomainError) as exc:
        flag = _offending_flag(str(exc))
        hint = f" (offending flag: {flag})" if flag else ""
        return _fail("domain", f"invalid schedule: {exc}{hint}")

    if args.out:
        try:
            write_curve_csv(args.out, samples)
        except OSError as exc:
            return _fail("io", f"cannot write {args.out}: {exc}")
    else:
        print("t,lr")
        for s in samples:
            print(f"{s.t!r},{s.lr!r}")
    return 0


def cmd_train(args) -> int:
    try:
        file_config = load_train_config(args.config)
        model, dataset, config = file_config.realize()
    except (ConfigError, DomainError) as exc:
        return _fail("config", f"{args.config}: {exc}")
    record = train(model, dataset, config)
    if args.out:
        try:
            write_run_report(args.out, record, include_wall_time=args.timings)
        except OSError as exc:
            return _fail("io", f"cannot write {args.out}: {exc}")
    else:
        sys.stdout.write(run_report_text(record, include_wall_time=args.timings))
    print(f"final_test_error={record.final_test_error!r}")
    if record.diverged:
        print("diverged=true")
    if args.timings:
        print(f"wall_time_s={record.wall_time_s!r}")
    return 0


def cmd_sweep(args) -> int:
    try:
        plan = load_sweep_config(args.plan).to_plan(args.out)
    except (ConfigError, DomainError) as exc:
        return _fail("config", f"{args.plan}: {exc}")
    try:
        Path(args.out).mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        return _fail("io", f"cannot create output directory {args.out}: {exc}")
    try:
        result = run_sweep(plan, resume=args.resume, include_wall_time=args.timings)
    except OSError as exc:
        return _fail("io", f"sweep output failed: {exc}")

    for (sid, k) in sorted(result.aggregates):
        agg = result.aggregates[(sid, k)]
        print(
            f"schedule={sid} k={k!r} median_err={agg.median_err!r} "
            f"min_err={agg.min_err!r} max_err={agg.max_err!r} n_diverged={agg.n_diverged}"
        )
    for template in plan.schedules:
        try:
            k, median = best_k(result, template.id)
        except DomainError:
            print(f"best_k schedule={template.id} undefined (all cells diverged)")
            continue
        print(f"best_k schedule={template.id} k={k!r} median_err={median!r}")
    return 0


def cmd_check(_args) -> int:
    results = run_self_checks()
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status} {result.name}  {result.detail}")
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "curve": cmd_curve,
        "train": cmd_train,
        "sweep": cmd_sweep,
        "check": cmd_check,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
