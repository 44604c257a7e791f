"""Causal scheduler that assumes the remaining packets arrive evenly spaced.

On each arrival the scheduler divides the time left until the deadline by
the number of packets not yet transmitted-or-queued, and never lets the
duration grow: ``t_i = min(t_{i-1}, (T - elapsed_i) / (P - i))``.  When the
queue empties before the next arrival the transmitter idles at zero power.
"""
from __future__ import annotations

import math

import numpy as np

from . import _backend
from .energy import ArrivalSequence, ProblemInstance, Schedule, ScheduleError, build_schedule, energy
from .offline import TIE_RTOL, _check_min_duration, opt_schedule


def on_schedule(arrivals: ArrivalSequence, instance: ProblemInstance) -> Schedule:
    k = _backend.kernels
    t = k.on_durations(arrivals.gaps, instance.deadline)
    _check_min_duration(t, instance)
    return build_schedule(t, k.on_starts(arrivals.gaps, t), instance.link)


def on_closed_form_decreasing(arrivals: ArrivalSequence, instance: ProblemInstance) -> Schedule:
    """Direct formula ``t_i = (T - a_1 - ... - a_i) / (P - i)``, valid only for non-increasing gaps."""
    if not arrivals.is_decreasing(rtol=1e-9):
        raise ScheduleError("closed form requires non-increasing gaps")
    P = instance.packet_count
    g = arrivals.gaps
    elapsed = np.concatenate(([0.0], np.cumsum(g[:-1])))
    t = (instance.deadline - elapsed) / (P - np.arange(P))
    _check_min_duration(t, instance)
    return build_schedule(t, _backend.kernels.on_starts(g, t), instance.link)


def ratio_from_gaps(gaps, instance: ProblemInstance) -> float:
    """Competitive ratio straight from a raw gap vector, skipping schedule construction."""
    k = _backend.kernels
    t_on = k.on_durations(gaps, instance.deadline)
    d_opt = k.opt_durations(gaps, TIE_RTOL)
    _check_min_duration(t_on, instance)
    _check_min_duration(d_opt, instance)
    link = instance.link
    return float(np.sum(energy(t_on, link))) / float(np.sum(energy(d_opt, link)))


def competitive_ratio(arrivals: ArrivalSequence, instance: ProblemInstance) -> float:
    """Per-sequence ratio of the causal scheduler's energy to the offline optimum's."""
    e_on = float(np.sum(on_schedule(arrivals, instance).per_packet_energy))
    e_opt = float(np.sum(opt_schedule(arrivals, instance).per_packet_energy))
    return e_on / e_opt


def ratio_bound(packet_count: int, base: float = math.e) -> float:
    """Worst-case guarantee ``1 + log(P)``; natural log unless ``base`` is given."""
    return 1.0 + math.log(packet_count, base)
