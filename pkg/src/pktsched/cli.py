"""Command-line harness: optimal schedules, error measurement, single runs,
instance generation, event-log ingestion, and sweep experiments."""

from __future__ import annotations

import argparse
import csv
import sys

from .core import Schedule, read_instance_csv, schedule_weight, write_instance_csv
from .experiments import (
    competitive_ratio,
    generate,
    ingest_snap_events,
    parse_config_file,
    parse_generator_spec,
    run_experiment_to_dir,
    write_day_instances,
)
from .lap import lap_run, write_trace_csv
from .offline import opt_schedule
from .online import OnlineStepPolicy, run_online
from .prediction import blind_follow, prediction_error


def _print_schedule(schedule: Schedule, out=None) -> None:
    writer = csv.writer(out or sys.stdout, lineterminator="\n")
    writer.writerow(["slot", "job_id", "weight"])
    for t, job in enumerate(schedule.slots):
        writer.writerow(
            [t, job.id if job else "", repr(job.weight) if job else repr(0.0)]
        )


def _cmd_opt(args) -> int:
    instance = read_instance_csv(args.instance)
    schedule = opt_schedule(instance)
    print(f"# optimal_weight={schedule_weight(schedule)!r}")
    _print_schedule(schedule)
    return 0


def _cmd_eta(args) -> int:
    realization = read_instance_csv(args.real)
    predicted = read_instance_csv(args.pred)
    print(repr(prediction_error(realization, predicted)))
    return 0


def _cmd_run(args) -> int:
    realization = read_instance_csv(args.real)
    predicted = read_instance_csv(args.pred) if args.pred else None
    trace = None
    if args.algo == "lap":
        if predicted is None:
            raise SystemExit("--algo lap requires --pred")
        policy = OnlineStepPolicy.parse(args.fallback)
        schedule, trace = lap_run(predicted, realization, args.rho, policy)
    elif args.algo == "blind":
        if predicted is None:
            raise SystemExit("--algo blind requires --pred")
        schedule = blind_follow(predicted, realization)
    else:
        schedule = run_online(OnlineStepPolicy.parse(args.algo), realization)
    print(f"# algorithm={args.algo}")
    print(f"# weight={schedule_weight(schedule)!r}")
    print(f"# competitive_ratio={competitive_ratio(realization, schedule)!r}")
    if predicted is not None:
        print(f"# eta={prediction_error(realization, predicted)!r}")
    _print_schedule(schedule)
    if args.trace:
        if trace is None:
            raise SystemExit("--trace is only meaningful with --algo lap")
        write_trace_csv(trace, args.trace)
    return 0


def _cmd_gen(args) -> int:
    spec = parse_generator_spec(args.spec, seed=args.seed)
    write_instance_csv(generate(spec), args.out)
    return 0


def _cmd_ingest(args) -> int:
    instances = ingest_snap_events(
        args.infile,
        slots_per_day=args.slots_per_day,
        band=(args.band_lo, args.band_hi),
        seed=args.seed,
        ts_col=args.ts_col,
    )
    paths = write_day_instances(instances, args.out_dir)
    print(f"wrote {len(paths)} day instance(s) to {args.out_dir}")
    return 0


def _cmd_experiment(args) -> int:
    config = parse_config_file(args.config)
    records = run_experiment_to_dir(config)
    print(f"wrote {len(records)} records to {config.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pktsched",
        description="Online packet scheduling with deadlines and predictions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("opt", help="print the optimal weight and schedule")
    p.add_argument("instance")
    p.set_defaults(func=_cmd_opt)

    p = sub.add_parser("eta", help="print the prediction error")
    p.add_argument("--real", required=True)
    p.add_argument("--pred", required=True)
    p.set_defaults(func=_cmd_eta)

    p = sub.add_parser("run", help="run one algorithm on an instance")
    p.add_argument(
        "--algo",
        required=True,
        help="lap | blind | greedy | edf | edf-alpha:<alpha> | mg",
    )
    p.add_argument("--real", required=True)
    p.add_argument("--pred")
    p.add_argument("--rho", type=float, default=1.1, help="threshold for lap (>= 1)")
    p.add_argument(
        "--fallback", default="greedy", help="fallback policy for lap"
    )
    p.add_argument("--trace", help="write the per-slot trace CSV here (lap only)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("gen", help="generate a synthetic instance CSV")
    p.add_argument(
        "--spec",
        required=True,
        help="e.g. uniform:T=75,lo=2,hi=8 or powerlaw:T=75,a=150,m=500",
    )
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("ingest", help="bucket an event log into day instances")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--slots-per-day", type=int, default=75)
    p.add_argument("--band-lo", type=int, default=300)
    p.add_argument("--band-hi", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ts-col", type=int, default=2)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("experiment", help="run a sweep from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
