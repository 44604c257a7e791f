from types import SimpleNamespace

import numpy as np
import pytest

from deadline_sched import _backend, _kernels_py
from deadline_sched.properties import PropertyReport, SuiteResult, random_case, run_property_suite


def smallest_k_groups(gaps, rel_tol=1e-12):
    a = np.asarray(gaps, dtype=np.float64)
    n, k0 = len(a), 0
    ends, means = [], []
    while k0 < n:
        sums = np.cumsum(a[k0:])
        avgs = sums / np.arange(1, n - k0 + 1)
        best = avgs.max()
        k = int(np.flatnonzero(avgs >= best - rel_tol * abs(best))[0]) + 1
        ends.append(k0 + k)
        means.append(sums[k - 1] / k)
        k0 += k
    return np.array(ends, dtype=np.int64), np.array(means)


def smallest_k_durations(gaps, rel_tol=1e-12):
    ends, means = smallest_k_groups(gaps, rel_tol)
    return np.repeat(means, np.diff(np.concatenate(([0], ends))))


def test_default_suite_passes(kernels):
    report = run_property_suite(seed=0, cases=300)
    assert report.passed, "\n".join(report.lines())
    for s in report.suites.values():
        assert s.checked > 0


def test_single_packet_case_is_first():
    rng = np.random.default_rng(0)
    inst, arr = random_case(rng, packets=1)
    assert inst.packet_count == 1 and arr.gaps.tolist() == [inst.deadline]


def test_corrupted_tie_break_is_caught(monkeypatch):
    broken = SimpleNamespace(
        opt_groups=smallest_k_groups,
        opt_durations=smallest_k_durations,
        on_durations=_kernels_py.on_durations,
        on_starts=_kernels_py.on_starts,
        eh_walk=_kernels_py.eh_walk,
    )
    monkeypatch.setattr(_backend, "kernels", broken)
    report = run_property_suite(seed=0, cases=300, eh_cases=0)
    assert not report.passed
    assert not report.suites["opt_follows_decreasing"].passed


def test_report_lines_format():
    rep = PropertyReport()
    rep.suite("demo").record(0.5)
    rep.suite("bad").record(-1.0, "case 3")
    lines = rep.lines()
    assert lines[0].startswith("PASS demo")
    assert lines[1].startswith("FAIL bad") and "first: case 3" in lines[1]
    assert not rep.passed


def test_empty_suite_does_not_pass():
    assert not SuiteResult("x").passed
