"""Command-line entry point: ``deadline-sched <command> ...``.

Exit codes: 0 success, 1 validation error, 2 property-suite failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from ._backend import BACKEND
from .adversary import SearchConfig, unknown_p_lower_bound, worst_case_search
from .energy import LinkParams, ProblemInstance, ScheduleError, validate_arrivals
from .harness import ExperimentConfig, emit_results, render_results, run_sweep
from .harvest import HarvestProfile, eh_on_schedule, grid_cr_surrogate, eh_nondegeneracy_check
from .offline import opt_schedule
from .online import competitive_ratio, on_schedule, ratio_bound
from .properties import run_property_suite

EXIT_OK, EXIT_INVALID, EXIT_PROPERTY, EXIT_IO = 0, 1, 2, 3
FULL_SCALE_TRIALS = 1000


def _read_text(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    return Path(source).read_text()


def _parse_numbers(text: str, source: str, width: int = 1) -> list:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != width:
            raise ScheduleError(f"{source}:{lineno}: expected {width} number(s), got {line!r}")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise ScheduleError(f"{source}:{lineno}: not a number: {line!r}") from None
        rows.append(values[0] if width == 1 else tuple(values))
    return rows


def _link(args) -> LinkParams:
    return LinkParams(args.bits, args.noise_density, args.bandwidth)


def _sequence_input(args):
    gaps = _parse_numbers(_read_text(args.sequence), args.sequence)
    if not gaps:
        raise ScheduleError("empty arrival sequence")
    packets = args.packets if args.packets is not None else len(gaps)
    deadline = args.deadline if args.deadline is not None else math.fsum(gaps)
    instance = ProblemInstance(packets, deadline, _link(args))
    return instance, validate_arrivals(gaps, instance)


def _schedule_rows(schedule, ledger=None) -> list[dict]:
    rows = []
    for i in range(len(schedule)):
        row = {
            "packet": i,
            "duration": float(schedule.durations[i]),
            "start": float(schedule.starts[i]),
            "finish": float(schedule.finishes[i]),
            "energy": float(schedule.per_packet_energy[i]),
            "power": float(schedule.per_packet_power[i]),
        }
        if ledger is not None:
            row["grid"] = float(ledger.grid_per_packet[i])
            row["harvested"] = float(ledger.harvested_used_per_packet[i])
            row["battery_at_start"] = float(ledger.battery_at_packet_start[i])
        rows.append(row)
    return rows


def _write(payload, rows, args):
    """Send ``payload`` as JSON, or ``rows`` as CSV, to ``--out`` (default stdout)."""
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (f"{v:.9g}" if isinstance(v, float) else v) for k, v in row.items()})
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {args.out}: {exc.strerror or exc}") from exc


def cmd_opt(args):
    instance, arrivals = _sequence_input(args)
    schedule = opt_schedule(arrivals, instance)
    _write({"algorithm": "opt", **schedule.to_dict()}, _schedule_rows(schedule), args)


def cmd_on(args):
    instance, arrivals = _sequence_input(args)
    schedule = on_schedule(arrivals, instance)
    payload = {"algorithm": "on", "idle_time": schedule.idle_time, **schedule.to_dict()}
    _write(payload, _schedule_rows(schedule), args)


def cmd_eh(args):
    instance, arrivals = _sequence_input(args)
    events = _parse_numbers(_read_text(args.harvest), args.harvest, width=2) if args.harvest else []
    harvest = HarvestProfile(
        [t for t, _ in events], [e for _, e in events], args.capacity, args.initial_charge
    )
    schedule, ledger = eh_on_schedule(arrivals, harvest, instance)
    nondegenerate = eh_nondegeneracy_check(arrivals, harvest, instance)
    payload = {
        "algorithm": "eh-on",
        "schedule": schedule.to_dict(),
        "ledger": ledger.to_dict(),
        "nondegenerate": nondegenerate,
        "surrogate_cr": grid_cr_surrogate(arrivals, harvest, instance, check=False),
        "surrogate_is_upper_bound": True,
    }
    _write(payload, _schedule_rows(schedule, ledger), args)


def cmd_cr(args):
    instance, arrivals = _sequence_input(args)
    on = on_schedule(arrivals, instance)
    opt = opt_schedule(arrivals, instance)
    row = {
        "packets": instance.packet_count,
        "energy_on": float(on.per_packet_energy.sum()),
        "energy_opt": float(opt.per_packet_energy.sum()),
        "competitive_ratio": competitive_ratio(arrivals, instance),
        "bound_natural": ratio_bound(instance.packet_count),
        "bound_base2": ratio_bound(instance.packet_count, 2),
    }
    _write(row, [row], args)


def cmd_sweep(args):
    try:
        data = json.loads(_read_text(args.config))
    except json.JSONDecodeError as exc:
        raise ScheduleError(f"{args.config}: invalid JSON: {exc}") from None
    config = ExperimentConfig.from_dict(data)
    if args.full_scale:
        config = ExperimentConfig.from_dict({**config.to_dict(), "trials_per_point": FULL_SCALE_TRIALS})
    if args.trials is not None:
        config = ExperimentConfig.from_dict({**config.to_dict(), "trials_per_point": args.trials})
    reports = run_sweep(config, workers=args.workers)
    out = args.out if args.out is not None else config.output_path
    fmt = args.format or (Path(out).suffix.lstrip(".") if out and out != "-" else "json")
    if fmt not in ("csv", "json"):
        fmt = "json"
    emit_results(reports, fmt, out or "-")


def cmd_worst_case(args):
    instance = ProblemInstance(args.packets, args.deadline, _link(args))
    config = SearchConfig(
        restarts=args.restarts,
        step_size=args.step_size,
        fd_epsilon=args.fd_epsilon,
        max_iters=args.max_iters,
        seed=args.seed,
    )
    res = worst_case_search(instance, config)
    row = {
        "packets": instance.packet_count,
        "competitive_ratio": res.ratio,
        "transformed_ratio": res.transformed_ratio,
        "converged": res.converged,
        "bound_natural": ratio_bound(instance.packet_count),
        "gaps": res.arrivals.gaps.tolist(),
    }
    csv_row = {k: v for k, v in row.items() if k != "gaps"}
    _write(row, [csv_row], args)


def cmd_unknown_p(args):
    rows = []
    for bits in args.bits:
        rows.append({"bits": bits, "lower_bound": unknown_p_lower_bound(bits, args.grid)})
    _write(rows, rows, args)


def cmd_check(args):
    report = run_property_suite(seed=args.seed, cases=args.cases)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.passed else EXIT_PROPERTY


def _instance_flags(p: argparse.ArgumentParser, deadline=None, packets=None):
    p.add_argument("--deadline", type=float, default=deadline, help="common deadline T in seconds")
    p.add_argument("--packets", type=int, default=packets, help="packet count P")
    p.add_argument("--bits", type=float, default=2e5, help="bits per packet B")
    p.add_argument("--noise-density", type=float, default=1e-19, help="noise density N0 in W/Hz")
    p.add_argument("--bandwidth", type=float, default=1e6, help="bandwidth W in Hz")


def _output_flags(p: argparse.ArgumentParser, default_format="json"):
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=default_format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deadline-sched",
        description="Energy-efficient packet scheduling for a common deadline.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_ in (
        ("opt", cmd_opt, "offline optimal schedule of one sequence"),
        ("on", cmd_on, "causal online schedule of one sequence"),
        ("eh", cmd_eh, "online schedule with harvested energy"),
        ("cr", cmd_cr, "competitive ratio of one sequence"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("sequence", nargs="?", default="-", help="file of gaps a_1..a_P, one per line ('-' for stdin)")
        _instance_flags(p)
        _output_flags(p)
        if name == "eh":
            p.add_argument("--harvest", help="file of 'timestamp amount' lines")
            p.add_argument("--capacity", type=float, default=math.inf, help="battery capacity in J")
            p.add_argument("--initial-charge", type=float, default=0.0)
        p.set_defaults(func=func)

    p = sub.add_parser("sweep", help="Monte-Carlo sweep from a JSON ExperimentConfig")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trials", type=int, default=None, help="override trials_per_point")
    p.add_argument("--full-scale", action="store_true", help=f"{FULL_SCALE_TRIALS} trials per point")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("worst-case", help="adversarial search for a bad arrival sequence")
    _instance_flags(p, deadline=100.0, packets=8)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--step-size", type=float, default=0.05)
    p.add_argument("--fd-epsilon", type=float, default=1e-6)
    _output_flags(p)
    p.set_defaults(func=cmd_worst_case)

    p = sub.add_parser("remark1", help="lower bound when P is unknown (P in {1, 2}, T = 1)")
    p.add_argument("--bits", type=float, nargs="+", default=[1.0, 2.0, 4.0, 8.0, 16.0])
    p.add_argument("--grid", type=int, default=4096)
    _output_flags(p)
    p.set_defaults(func=cmd_unknown_p)

    p = sub.add_parser("check", help="run the randomised property suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=2000)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ScheduleError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
