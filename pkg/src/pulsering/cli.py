"""Command-line front end: run sweeps, replay traces, build lower-bound
witnesses.

Exit codes: 0 success, 1 usage error, 2 invariant failure, 3 liveness
(step-limit) failure.  Output is a pure function of (config, seeds).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
from pathlib import Path

from . import oracle
from .protocols import PROTOCOLS, pulse_bound, run
from .ring import (
    LivenessError,
    PortAssignment,
    RingError,
    ValidationError,
    make_scheduler,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2
EXIT_LIVENESS = 3

OUTPUT_DIR_ENV = "PULSERING_OUT"


def _out_dir(args) -> Path:
    base = getattr(args, "out_dir", None) or os.environ.get(OUTPUT_DIR_ENV) or "."
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def parse_seeds(text: str) -> list[int]:
    """Parse '7', '0..99', or '1,3,5' into a seed list."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    if not seeds:
        raise ValidationError(f"empty seed specification {text!r}")
    return seeds


def parse_ids(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _make_assignment(args, ids: list[int], seed: int) -> PortAssignment | None:
    if args.ports == "oriented":
        return None  # build_ring defaults to the oriented ring
    if args.ports == "random":
        rng = random.Random(f"ports:{seed}")
        return PortAssignment.from_swaps([rng.randint(0, 1) for _ in ids])
    # a file of swap flags or explicit wiring pairs
    data = json.loads(Path(args.ports).read_text())
    if data and isinstance(data[0], int):
        return PortAssignment.from_swaps(data)
    return PortAssignment.from_jsonable(data)


def _resolve_ids(args) -> list[int]:
    if args.ids:
        return parse_ids(args.ids)
    if args.n and args.id_max:
        rng = random.Random(f"ids:{args.n}:{args.id_max}")
        if args.id_max < args.n:
            raise ValidationError("--id-max must be >= --n for distinct IDs")
        return rng.sample(range(1, args.id_max + 1), args.n)
    raise ValidationError("provide --ids or both --n and --id-max")


_CHECKERS = {
    "a1": oracle.check_a1_invariants,
    "a2": oracle.check_a2_invariants,
    "a3a": oracle.check_a3_outcome,
    "a3b": oracle.check_a3_outcome,
    "a3b+resample": oracle.check_a3_outcome,
    "a4+a3b": oracle.check_a3_outcome,
}


def cmd_run(args) -> int:
    protocol = args.protocol
    if protocol == "a4+a3b":
        ids = None
        if args.n is None or args.c is None:
            print("a4+a3b needs --n and --c", file=sys.stderr)
            return EXIT_USAGE
    else:
        ids = _resolve_ids(args)
    seeds = parse_seeds(args.seeds)
    out_dir = _out_dir(args)

    reports = []
    totals = []
    trace_paths = []
    for seed in seeds:
        for trial in range(args.trials):
            run_seed = seed if args.trials == 1 else seed * args.trials + trial
            assignment = _make_assignment(args, ids or [0] * (args.n or 1), run_seed)
            sched = make_scheduler(args.scheduler, seed=run_seed)
            kwargs = {}
            if protocol == "a4+a3b":
                kwargs = {"n": args.n, "c": args.c, "bit_cap": args.bit_cap}
            try:
                trace = run(
                    ids,
                    protocol=protocol,
                    assignment=assignment,
                    scheduler=sched,
                    seed=run_seed,
                    step_mult=args.step_mult,
                    **kwargs,
                )
            except LivenessError as exc:
                path = out_dir / f"liveness-{protocol}-{run_seed}.jsonl"
                path.write_text(exc.trace.to_jsonl())
                print(f"FAIL liveness seed={run_seed}; partial trace: {path}")
                return EXIT_LIVENESS
            report = _CHECKERS[protocol](trace)
            reports.append((run_seed, report))
            totals.append(trace.final["total_sent"])
            if args.trace_out:
                path = out_dir / f"{args.trace_out}-{run_seed}.jsonl"
                path.write_text(trace.to_jsonl())
                trace_paths.append(str(path))
            dup_leaders = [
                v for v, o in enumerate(trace.final["outputs"]) if o == "leader"
            ]
            if protocol == "a1" and len(dup_leaders) > 1:
                print(
                    f"note: seed={run_seed} elected {len(dup_leaders)} leaders "
                    f"(duplicate maximum IDs)"
                )

    all_pass = all(r.all_passed for _, r in reports)
    used_ids = ids if ids is not None else []
    summary_row = {
        "protocol": protocol,
        "n": len(used_ids) if used_ids else args.n,
        "IDmax": max(used_ids) if used_ids else "",
        "seeds": args.seeds,
        "total_pulses_min": min(totals),
        "total_pulses_max": max(totals),
        "all_invariants_pass": all_pass,
    }
    report_path = out_dir / (args.report_out or f"report-{protocol}.json")
    report_path.write_text(
        json.dumps(
            {
                "summary": summary_row,
                "runs": [
                    {"seed": s, **r.to_jsonable()}
                    for s, r in reports
                    if not r.all_passed or args.full_report
                ],
                "traces": trace_paths,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    csv_path = report_path.with_suffix(".csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(summary_row))
        writer.writeheader()
        writer.writerow(summary_row)
    print(
        f"{protocol}: {len(reports)} runs, totals "
        f"[{summary_row['total_pulses_min']}, {summary_row['total_pulses_max']}], "
        f"invariants {'PASS' if all_pass else 'FAIL'}"
    )
    if not all_pass:
        failing = next(s for s, r in reports if not r.all_passed)
        print(f"reproducer in {report_path} (first failing seed: {failing})")
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        trace = oracle.ExecutionTrace.from_jsonl(Path(args.trace).read_text())
    except (OSError, ValidationError, json.JSONDecodeError) as exc:
        print(f"cannot load trace: {exc}", file=sys.stderr)
        return EXIT_USAGE
    identical, index = oracle.replay_trace(trace)
    if identical:
        print("replay identical")
        return EXIT_OK
    print(f"replay diverged at event index {index}")
    return EXIT_INVARIANT


def cmd_lowerbound(args) -> int:
    try:
        result = oracle.lower_bound_experiment(args.protocol, args.k, args.n)
    except ValidationError as exc:
        print(f"lower-bound construction failed: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    out_dir = _out_dir(args)
    path = out_dir / (args.report_out or f"lowerbound-{args.protocol}.json")
    path.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    print(
        f"witness ids={result['ids']} prefix={result['prefix_length']} "
        f"bound={result['pulse_lower_bound']} "
        f"measured={result['deliveries_before_divergence']}"
    )
    return EXIT_OK if result["bound_met"] else EXIT_INVARIANT


def _apply_config_file(args, parser) -> None:
    """A JSON config supplies defaults; explicit flags win."""
    if not args.config:
        return
    data = json.loads(Path(args.config).read_text())
    for key, value in data.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            parser.error(f"unknown config key {key!r}")
        if parser.get_default(attr) == getattr(args, attr):
            setattr(args, attr, value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulsering",
        description="Simulate and verify pulse-only ring protocols.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a sweep and verify invariants")
    p_run.add_argument("--protocol", choices=PROTOCOLS, required=True)
    p_run.add_argument("--ids", help="comma-separated IDs, e.g. 1,2,3")
    p_run.add_argument("--n", type=int, help="ring size (with --id-max or --c)")
    p_run.add_argument("--id-max", type=int, help="draw n distinct IDs up to this")
    p_run.add_argument(
        "--ports",
        default="oriented",
        help="oriented | random | path to a wiring/swaps JSON file",
    )
    p_run.add_argument(
        "--scheduler",
        default="random",
        choices=["random", "roundrobin", "priority", "fifo"],
    )
    p_run.add_argument("--seeds", default="0", help="e.g. 7 or 0..99 or 1,3,5")
    p_run.add_argument("--trials", type=int, default=1)
    p_run.add_argument("--step-mult", type=float, default=2.0)
    p_run.add_argument("--trace-out", help="basename for per-seed JSONL traces")
    p_run.add_argument("--report-out", help="report filename (JSON; CSV beside it)")
    p_run.add_argument("--c", type=float, help="tail constant for sampled IDs")
    p_run.add_argument("--bit-cap", type=int, help="truncate sampled ID bit-length")
    p_run.add_argument("--out-dir", help=f"output directory (or ${OUTPUT_DIR_ENV})")
    p_run.add_argument("--config", help="JSON config file; flags override it")
    p_run.add_argument("--full-report", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_replay = sub.add_parser("replay", help="re-execute a trace and compare")
    p_replay.add_argument("trace", help="JSONL trace file")
    p_replay.set_defaults(func=cmd_replay)

    p_lb = sub.add_parser("lowerbound", help="build and measure a pulse-floor witness")
    p_lb.add_argument("--protocol", choices=["a1", "a2"], default="a2")
    p_lb.add_argument("--k", type=int, required=True, help="solitude pattern count")
    p_lb.add_argument("--n", type=int, required=True, help="witness ring size")
    p_lb.add_argument("--report-out")
    p_lb.add_argument("--out-dir", help=f"output directory (or ${OUTPUT_DIR_ENV})")
    p_lb.set_defaults(func=cmd_lowerbound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            _apply_config_file(args, parser)
        return args.func(args)
    except LivenessError as exc:
        print(f"liveness failure: {exc}", file=sys.stderr)
        return EXIT_LIVENESS
    except (ValidationError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RingError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
