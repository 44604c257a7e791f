"""Randomised invariant checks over all schedulers.

Each suite records how many cases it checked, how many violated the
invariant and the worst slack seen (allowed minus observed; negative means
violated).  ``run_property_suite`` is what ``deadline-sched check`` runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energy import (
    SUM_RTOL,
    ArrivalSequence,
    LinkParams,
    ProblemInstance,
    SaturationError,
    check_schedule,
    validate_arrivals,
)
from .harvest import HarvestProfile, eh_on_schedule
from .offline import opt_groups, opt_schedule, opt_transform
from .online import on_closed_form_decreasing, on_schedule, ratio_bound

ENERGY_RTOL = 1e-9
CLOSED_FORM_TOL = 1e-12  # times the deadline
LEVEL_ATOL = 1e-12


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: int = 0
    worst_slack: float = math.inf
    first_failure: str | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.checked > 0

    def record(self, slack: float, detail: str = ""):
        self.checked += 1
        if slack < self.worst_slack:
            self.worst_slack = slack
        if not slack >= 0:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = detail or f"slack {slack:.3g}"


@dataclass
class PropertyReport:
    suites: dict = field(default_factory=dict)
    skipped: int = 0

    def suite(self, name: str) -> SuiteResult:
        if name not in self.suites:
            self.suites[name] = SuiteResult(name)
        return self.suites[name]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites.values())

    def lines(self) -> list[str]:
        out = []
        for s in self.suites.values():
            status = "PASS" if s.passed else "FAIL"
            line = f"{status} {s.name:<24} checked={s.checked:<6} failures={s.failures:<4} worst_slack={s.worst_slack:.3e}"
            if s.first_failure:
                line += f"  first: {s.first_failure}"
            out.append(line)
        out.append(f"skipped (saturated) cases: {self.skipped}")
        return out


def random_case(rng: np.random.Generator, packets: int | None = None, max_packets: int = 40):
    """Random instance and arrival sequence; some gaps are zero (simultaneous arrivals)."""
    if packets is None:
        packets = int(rng.choice([1, 2, 3, int(rng.integers(4, max_packets + 1))]))
    P = packets
    T = float(rng.uniform(0.5, 100.0))
    link = LinkParams(float(rng.uniform(0.2, 2.0)) * T / P, float(rng.uniform(0.5, 2.0)), 1.0)
    inst = ProblemInstance(P, T, link)
    g = rng.dirichlet(np.full(P, float(rng.uniform(0.3, 3.0))))
    if P > 2:
        g[:-1][rng.random(P - 1) < 0.1] = 0.0
    g[-1] = max(g[-1], 0.02 / P)
    g *= T / g.sum()
    g[-1] = T - float(np.sum(g[:-1]))
    return inst, validate_arrivals(g, inst)


def random_decreasing_case(rng: np.random.Generator, packets: int | None = None):
    """Instance with non-increasing gaps; half the cases contain exact ties."""
    inst, _ = random_case(rng, packets)
    P, T = inst.packet_count, inst.deadline
    if rng.random() < 0.5:
        g = np.sort(rng.integers(1, 6, P).astype(np.float64))[::-1]
    else:
        g = np.sort(rng.dirichlet(np.ones(P)) + 0.02 / P)[::-1]
    g = g * (T / g.sum())
    return inst, ArrivalSequence(g, T)


def _energy(schedule) -> float:
    return float(np.sum(schedule.per_packet_energy))


def check_no_eh(report: PropertyReport, inst: ProblemInstance, arr: ArrivalSequence, rng):
    T, P = inst.deadline, inst.packet_count
    opt = opt_schedule(arr, inst)
    on = on_schedule(arr, inst)
    d = opt.durations
    tag = f"P={P} gaps={arr.gaps.tolist()[:6]}"

    report.suite("opt_sum").record(SUM_RTOL * T - abs(float(np.sum(d)) - T), tag)
    gap_cum = np.cumsum(arr.gaps[:-1])
    dur_cum = np.cumsum(d[:-1])
    causal = float(np.min(dur_cum - gap_cum)) if P > 1 else 0.0
    report.suite("opt_causality").record(causal + SUM_RTOL * T, tag)
    mono = float(np.min(d[:-1] - d[1:])) if P > 1 else 0.0
    report.suite("opt_monotone").record(mono, tag)
    report.suite("opt_schedule_valid").record(-len(check_schedule(opt, arr, inst.link)), tag)

    t = on.durations
    report.suite("on_monotone").record(float(np.min(t[:-1] - t[1:])) if P > 1 else 0.0, tag)
    problems = check_schedule(on, arr, inst.link)
    report.suite("on_schedule_valid").record(-len(problems), f"{tag} {problems}")

    # Durations up to packet i may depend only on gaps a_1..a_i.
    if P == 1:
        report.suite("on_causality").record(0.0, tag)
    else:
        i = int(rng.integers(0, P - 1))
        head = arr.gaps[:i]
        rest = T - float(np.sum(head))
        tail = rng.dirichlet(np.ones(P - i)) * rest
        tail[-1] = max(tail[-1], 0.02 * rest / P)
        tail *= rest / tail.sum()
        alt = ArrivalSequence(np.concatenate((head, tail)), T)
        try:
            t_alt = on_schedule(alt, inst).durations
            same = np.array_equal(t_alt[: i + 1], t[: i + 1])
            report.suite("on_causality").record(0.0 if same else -1.0, f"{tag} prefix={i}")
        except SaturationError:
            report.skipped += 1

    e_on, e_opt = _energy(on), _energy(opt)
    cr = e_on / e_opt
    report.suite("ratio_ceiling").record(ratio_bound(P) - cr, f"{tag} cr={cr}")
    report.suite("ratio_at_least_one").record(cr - (1 - 1e-9), f"{tag} cr={cr}")

    arr2 = opt_transform(arr, inst)
    on2 = on_schedule(arr2, inst)
    opt2 = opt_schedule(arr2, inst)
    e_on2, e_opt2 = _energy(on2), _energy(opt2)
    report.suite("transform_decreasing").record(
        0.0 if arr2.is_decreasing(rtol=1e-9) else -1.0, tag
    )
    report.suite("transform_raises_on").record(e_on2 - e_on * (1 - ENERGY_RTOL), tag)
    report.suite("transform_keeps_opt").record(ENERGY_RTOL * e_opt - abs(e_opt2 - e_opt), tag)
    report.suite("transform_raises_ratio").record(e_on2 / e_opt2 - cr + 1e-9, tag)
    idem = opt_transform(arr2, inst)
    report.suite("transform_idempotent").record(
        1e-9 * T - float(np.max(np.abs(idem.gaps - arr2.gaps))), tag
    )


def check_decreasing(report: PropertyReport, inst: ProblemInstance, arr: ArrivalSequence):
    T, P = inst.deadline, inst.packet_count
    tag = f"P={P} gaps={arr.gaps.tolist()[:6]}"
    d = opt_schedule(arr, inst).durations
    groups = opt_groups(arr)
    follow = 1e-12 * T - float(np.max(np.abs(d - arr.gaps)))
    means = [g.group_duration for g in groups]
    strict = min((a - b for a, b in zip(means, means[1:])), default=1.0)
    ends_ok = groups[-1].end_index == P and all(
        a.end_index < b.end_index for a, b in zip(groups, groups[1:])
    )
    # Equal-mean neighbouring groups mean the longest-prefix tie-break was not applied.
    report.suite("opt_follows_decreasing").record(
        min(follow, strict if strict > 0 else -1.0, 0.0 if ends_ok else -1.0), tag
    )
    t = on_schedule(arr, inst).durations
    closed = on_closed_form_decreasing(arr, inst).durations
    err = float(np.max(np.abs(t - closed)))
    report.suite("on_closed_form").record(CLOSED_FORM_TOL * T - err, tag)


def random_harvest(rng: np.random.Generator, inst: ProblemInstance, scale: float) -> HarvestProfile:
    T = inst.deadline
    m = int(rng.integers(0, 12))
    times = np.unique(rng.uniform(0.0, T, m))
    if m and rng.random() < 0.3:
        times[0] = 0.0
    amounts = rng.exponential(scale * float(rng.uniform(0.05, 2.0)) / max(len(times), 1), len(times))
    cap = math.inf if rng.random() < 0.3 else float(rng.uniform(0.1, 2.0)) * scale
    initial = float(rng.uniform(0.0, min(cap, scale)))
    return HarvestProfile(times, amounts, cap, initial)


def _level_at_breakpoints(traj, start, end):
    return [lvl for (tau, lvl) in traj if start <= tau < end]


def check_eh(report: PropertyReport, inst: ProblemInstance, arr: ArrivalSequence, rng):
    tag = f"P={inst.packet_count}"
    on = on_schedule(arr, inst)
    scale = _energy(on)
    harvest = random_harvest(rng, inst, scale)
    sched, led = eh_on_schedule(arr, harvest, inst)

    same = np.array_equal(sched.durations, on.durations) and np.array_equal(sched.starts, on.starts)
    report.suite("eh_durations_match_on").record(0.0 if same else -1.0, tag)

    e = sched.per_packet_energy
    split = np.abs(led.grid_per_packet + led.harvested_used_per_packet - e) / e
    report.suite("eh_split_per_packet").record(ENERGY_RTOL - float(np.max(split)), tag)

    inflow = harvest.total
    outflow = led.total_harvested_used + led.final_level + led.wasted_overflow
    report.suite("eh_conservation").record(
        ENERGY_RTOL * max(inflow, 1e-300) - abs(outflow - inflow), f"{tag} in={inflow} out={outflow}"
    )

    levels = np.array([lvl for _, lvl in led.battery_trajectory])
    cap = harvest.battery_capacity
    low = float(np.min(levels)) + LEVEL_ATOL
    high = (cap - float(np.max(levels)) + LEVEL_ATOL) if math.isfinite(cap) else 1.0
    report.suite("eh_battery_bounds").record(min(low, high), tag)

    worst = 0.0
    for a, b, i in led.grid_intervals:
        inside = sched.starts[i] - 1e-12 <= a and b <= sched.finishes[i] + 1e-12
        lv = _level_at_breakpoints(led.battery_trajectory, a, b)
        worst = min(worst, LEVEL_ATOL - max(lv, default=0.0), 0.0 if inside else -1.0)
    report.suite("eh_greedy").record(worst, tag)

    # An extra harvest event can only lower grid use.
    t_new = float(rng.uniform(0.0, inst.deadline))
    if t_new not in harvest.timestamps:
        order = np.argsort(np.append(harvest.timestamps, t_new))
        more = HarvestProfile(
            np.append(harvest.timestamps, t_new)[order],
            np.append(harvest.amounts, rng.exponential(scale / 4))[order],
            harvest.battery_capacity,
            harvest.initial_charge,
        )
        _, led2 = eh_on_schedule(arr, more, inst)
        report.suite("eh_monotone_benefit").record(
            1e-12 * scale + led.total_grid - led2.total_grid, tag
        )

    zero = HarvestProfile(harvest.timestamps, np.zeros_like(harvest.amounts), harvest.battery_capacity)
    _, led0 = eh_on_schedule(arr, zero, inst)
    report.suite("eh_zero_harvest_all_grid").record(
        0.0 if np.array_equal(led0.grid_per_packet, e) else -1.0, tag
    )


def run_property_suite(seed: int = 0, cases: int = 2000, eh_cases: int | None = None) -> PropertyReport:
    rng = np.random.default_rng(seed)
    report = PropertyReport()
    eh_cases = cases if eh_cases is None else eh_cases
    for n in range(cases):
        try:
            inst, arr = random_case(rng, packets=1 if n == 0 else None)
            check_no_eh(report, inst, arr, rng)
        except SaturationError:
            report.skipped += 1
        try:
            inst, arr = random_decreasing_case(rng, packets=1 if n == 0 else None)
            check_decreasing(report, inst, arr)
        except SaturationError:
            report.skipped += 1
    for n in range(eh_cases):
        try:
            inst, arr = random_case(rng, packets=1 if n == 0 else None)
            check_eh(report, inst, arr, rng)
        except SaturationError:
            report.skipped += 1
    return report
