"""Monte-Carlo sweeps over instance and workload parameters.

A sweep varies one parameter over a list of values and, at each value, runs
``trials_per_point`` seeded trials through one pipeline:

``no_eh``       causal vs offline-optimal energy ratio on random arrivals
``eh``          greedy harvesting scheduler's grid energy over the optimal-grid lower bound
``worst_case``  adversarial hill climb, one trial per restart
``remark1``     lower bound for schedulers that do not know ``P`` (sweep over bits)
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .adversary import SearchConfig, unknown_p_lower_bound, worst_case_search
from .energy import DomainError, LinkParams, ProblemInstance, ScheduleError
from .harvest import SURROGATE_EPS, ledger_for
from .offline import opt_schedule
from .online import on_schedule, ratio_bound, ratio_from_gaps
from .workload import WorkloadSpec, gen_arrivals, gen_harvest

SWEEP_VARIABLES = ("packet_count", "deadline", "packet_bits", "harvest_mean", "harvest_epochs")
MODES = ("no_eh", "eh", "worst_case", "remark1")
CSV_COLUMNS = ("sweep_value", "mean_cr", "p95_cr", "max_cr", "bound_natural", "bound_base2", "trials")

DEFAULT_INSTANCE = ProblemInstance(200, 100.0, LinkParams(2e5, 1e-19, 1e6))
DEFAULT_EH_INSTANCE = ProblemInstance(400, 100.0, LinkParams(5e5, 1e-19, 1e6))
DEFAULT_EH_WORKLOAD = WorkloadSpec(harvest_epoch_count=20, harvest_amount_mean=0.010)


class TrialError(ScheduleError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    sweep_variable: str
    sweep_values: tuple
    trials_per_point: int = 50
    base_instance: ProblemInstance = DEFAULT_INSTANCE
    workload: WorkloadSpec = WorkloadSpec()
    mode: str = "no_eh"
    output_path: str | None = None
    search: SearchConfig = SearchConfig()
    b0_grid: int = 4096

    def __post_init__(self):
        if self.sweep_variable not in SWEEP_VARIABLES:
            raise DomainError(f"unknown sweep_variable {self.sweep_variable!r}")
        if self.mode not in MODES:
            raise DomainError(f"unknown mode {self.mode!r}")
        if len(self.sweep_values) == 0:
            raise DomainError("sweep_values must be non-empty")
        if self.trials_per_point < 1:
            raise DomainError("trials_per_point must be >= 1")
        object.__setattr__(self, "sweep_values", tuple(self.sweep_values))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "base_instance" in data:
            inst = dict(data["base_instance"])
            link = LinkParams(**inst.pop("link", {}))
            data["base_instance"] = ProblemInstance(link=link, **inst)
        if "workload" in data:
            wl = dict(data["workload"])
            if wl.get("battery_capacity") is None:
                wl["battery_capacity"] = math.inf
            data["workload"] = WorkloadSpec(**wl)
        if "search" in data:
            data["search"] = SearchConfig(**data["search"])
        return cls(**data)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["sweep_values"] = list(self.sweep_values)
        if math.isinf(self.workload.battery_capacity):
            out["workload"]["battery_capacity"] = None
        return out


@dataclass
class CrReport:
    sweep_value: float
    mean_cr: float
    p95_cr: float
    max_cr: float
    bound_natural: float
    bound_base2: float
    trials: int
    mode_metadata: dict = field(default_factory=dict)


def point_setup(config: ExperimentConfig, value) -> tuple[ProblemInstance, WorkloadSpec]:
    inst = config.base_instance
    wl = config.workload
    var = config.sweep_variable
    if var == "packet_count":
        inst = replace(inst, packet_count=int(value))
    elif var == "deadline":
        inst = replace(inst, deadline=float(value))
    elif var == "packet_bits":
        inst = replace(inst, link=replace(inst.link, bits_per_packet=float(value)))
    elif var == "harvest_mean":
        wl = replace(wl, harvest_amount_mean=float(value))
    elif var == "harvest_epochs":
        wl = replace(wl, harvest_epoch_count=int(value))
    return inst, wl


def _no_eh_trial(inst: ProblemInstance, wl: WorkloadSpec, trial: int) -> float:
    return ratio_from_gaps(gen_arrivals(inst, wl, trial).gaps, inst)


def _eh_trial(inst: ProblemInstance, wl: WorkloadSpec, trial: int) -> dict:
    arrivals = gen_arrivals(inst, wl, trial)
    harvest = gen_harvest(inst, wl, trial)
    schedule = on_schedule(arrivals, inst)
    ledger = ledger_for(schedule, harvest)
    e_opt = float(np.sum(opt_schedule(arrivals, inst).per_packet_energy))
    free = harvest.total
    half = inst.deadline / 2
    return {
        "cr": ledger.total_grid / max(SURROGATE_EPS * e_opt, e_opt - free),
        "e_opt": e_opt,
        "nondegenerate": e_opt - free > 0,
        "half_windows": (harvest.window_total(0.0, half), harvest.window_total(half, math.inf)),
    }


def _run_trial(args):
    mode, inst, wl, trial = args
    try:
        if mode == "no_eh":
            return _no_eh_trial(inst, wl, trial)
        return _eh_trial(inst, wl, trial)
    except ScheduleError as exc:
        raise TrialError(f"trial {trial}: {exc}") from exc


def _summary(value, values, P: int, metadata: dict) -> CrReport:
    v = np.asarray(values, dtype=np.float64)
    return CrReport(
        sweep_value=float(value),
        mean_cr=float(np.mean(v)),
        p95_cr=float(np.percentile(v, 95)),
        max_cr=float(np.max(v)),
        bound_natural=ratio_bound(P),
        bound_base2=ratio_bound(P, 2),
        trials=len(v),
        mode_metadata=metadata,
    )


def run_sweep(config: ExperimentConfig, workers: int = 1) -> list[CrReport]:
    """Run every sweep point; deterministic for a fixed config regardless of ``workers``."""
    reports = []
    pool = ProcessPoolExecutor(workers) if workers > 1 and config.mode in ("no_eh", "eh") else None
    try:
        for value in config.sweep_values:
            inst, wl = point_setup(config, value)
            if config.mode == "remark1":
                lb = unknown_p_lower_bound(inst.link.bits_per_packet, config.b0_grid)
                reports.append(_summary(value, [lb], 2, {"b0_grid": config.b0_grid}))
                continue
            if config.mode == "worst_case":
                search = replace(config.search, restarts=config.trials_per_point, seed=wl.seed)
                res = worst_case_search(inst, search)
                meta = {"converged": res.converged, "transformed_ratio": res.transformed_ratio}
                reports.append(_summary(value, res.restart_ratios, inst.packet_count, meta))
                continue
            jobs = [(config.mode, inst, wl, t) for t in range(config.trials_per_point)]
            results = list(pool.map(_run_trial, jobs, chunksize=16) if pool else map(_run_trial, jobs))
            if config.mode == "no_eh":
                reports.append(_summary(value, results, inst.packet_count, {}))
            else:
                reports.append(_eh_report(value, inst, results))
    finally:
        if pool:
            pool.shutdown()
    return reports


def _eh_report(value, inst: ProblemInstance, results: list[dict]) -> CrReport:
    halves = np.array([r["half_windows"] for r in results])
    eta = float(np.mean(halves)) if len(halves) else 0.0
    e_opt = np.array([r["e_opt"] for r in results])
    # Smallest m that satisfies the harvest assumption for every sampled arrival sequence.
    margin = float(np.max(e_opt / (e_opt - 2 * eta))) if np.all(2 * eta < e_opt) else math.inf
    meta = {
        "surrogate_upper_bound": True,
        "eta": eta,
        "margin_m": margin,
        "margin_bound": margin * ratio_bound(inst.packet_count),
        "nondegenerate_trials": int(sum(r["nondegenerate"] for r in results)),
    }
    return _summary(value, [r["cr"] for r in results], inst.packet_count, meta)


def _fmt(x):
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.9g}") if math.isfinite(x) else None
    if isinstance(x, dict):
        return {k: _fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_fmt(v) for v in x]
    return x


def report_rows(reports: list[CrReport]) -> list[dict]:
    return [_fmt(asdict(r)) for r in reports]


def emit_results(reports: list[CrReport], format: str, path) -> None:
    """Write reports as CSV (fixed columns) or JSON, floats to 9 significant digits.

    ``path`` may be ``"-"`` for stdout.  I/O failures raise ``OSError``
    naming the path.
    """
    text = render_results(reports, format)
    if path in (None, "-"):
        import sys

        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror or exc}") from exc


def render_results(reports: list[CrReport], format: str) -> str:
    if format == "json":
        return json.dumps(report_rows(reports), indent=2) + "\n"
    if format != "csv":
        raise DomainError(f"unknown format {format!r}")
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        row = []
        for col in CSV_COLUMNS:
            v = getattr(r, col)
            row.append(str(v) if col == "trials" else f"{v:.9g}")
        writer.writerow(row)
    return buf.getvalue()


def load_results(path, format: str | None = None) -> list[CrReport]:
    path = Path(path)
    format = format or path.suffix.lstrip(".")
    text = path.read_text()
    if format == "json":
        return [CrReport(**row) for row in json.loads(text)]
    rows = list(csv.DictReader(text.splitlines()))
    return [
        CrReport(**{k: (int(v) if k == "trials" else float(v)) for k, v in row.items()})
        for row in rows
    ]
