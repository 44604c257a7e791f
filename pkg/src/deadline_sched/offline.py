"""Offline optimal scheduler for a common deadline.

With the whole arrival sequence known, the optimum never idles: packets are
split into consecutive groups, each group sent back to back with one common
duration equal to the largest mean of the remaining gaps' prefixes.  The
durations are non-increasing and every packet still starts after it arrives.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import _backend
from .energy import (
    ArrivalSequence,
    ProblemInstance,
    SaturationError,
    Schedule,
    ScheduleError,
    build_schedule,
    energy,
    energy_slope,
)

TIE_RTOL = 1e-12


@dataclass(frozen=True)
class GroupBoundary:
    end_index: int
    group_duration: float


def opt_groups(arrivals: ArrivalSequence) -> list[GroupBoundary]:
    ends, means = _backend.kernels.opt_groups(arrivals.gaps, TIE_RTOL)
    return [GroupBoundary(int(k), float(m)) for k, m in zip(ends, means)]


def _check_min_duration(durations, instance: ProblemInstance):
    if float(np.min(durations)) < instance.min_duration:
        raise SaturationError(
            f"duration {float(np.min(durations)):.3g} s is below {instance.min_duration:.3g} s"
        )


def opt_schedule(arrivals: ArrivalSequence, instance: ProblemInstance) -> Schedule:
    d = _backend.kernels.opt_durations(arrivals.gaps, TIE_RTOL)
    _check_min_duration(d, instance)
    starts = np.empty_like(d)
    starts[0] = 0.0
    np.cumsum(d[:-1], out=starts[1:])
    return build_schedule(d, starts, instance.link)


def opt_transform(arrivals: ArrivalSequence, instance: ProblemInstance | None = None) -> ArrivalSequence:
    """Use the optimal durations as a new gap sequence.

    The first ``P-1`` new gaps are ``d_0..d_{P-2}`` and the tail gap is
    whatever is left up to the deadline.  The result has non-increasing gaps
    and the same optimal energy as the input.
    """
    d = _backend.kernels.opt_durations(arrivals.gaps, TIE_RTOL)
    gaps = d.copy()
    gaps[-1] = arrivals.deadline - float(np.sum(d[:-1]))
    return ArrivalSequence(gaps, arrivals.deadline)


def lipschitz_slack(durations, grid_step: float, instance: ProblemInstance) -> float:
    """Energy increase bound when every cumulative duration is rounded up to the grid."""
    d = np.asarray(durations, dtype=np.float64)
    lo = np.maximum(d - grid_step, instance.min_duration)
    return float(np.sum(np.abs(energy_slope(lo, instance.link))) * grid_step)


def opt_oracle(arrivals: ArrivalSequence, instance: ProblemInstance, grid_step: float) -> Schedule:
    """Brute-force minimum-energy non-idling schedule over a duration grid.

    Enumerates every vector of positive grid-multiple durations summing to
    the deadline that keeps each packet's start after its arrival.  Only
    meant for ``P <= 4`` as an independent check of :func:`opt_schedule`.
    """
    P = instance.packet_count
    T = instance.deadline
    if P > 4:
        raise ScheduleError(f"opt_oracle refuses P={P}; brute force is limited to P <= 4")
    cells = T / grid_step
    n = int(round(cells))
    if abs(cells - n) > 1e-9 * max(cells, 1.0) or n < P:
        raise ScheduleError(f"grid_step {grid_step!r} must split the deadline into >= P whole cells")
    if n > 10_000:
        raise ScheduleError(f"grid of {n} cells exceeds the 10^4 limit")
    if P == 1:
        return build_schedule([T], [0.0], instance.link)

    # Cumulative finish times in cells; finish of packet l must reach arrival of packet l + 1.
    arrivals_at = np.cumsum(arrivals.gaps[:-1])
    lower = np.ceil(arrivals_at / grid_step - 1e-9).astype(np.int64)
    cuts = np.array(list(itertools.combinations(range(1, n), P - 1)), dtype=np.int64)
    cuts = cuts[np.all(cuts >= lower, axis=1)]
    if len(cuts) == 0:
        raise ScheduleError("no feasible grid point; refine grid_step")
    edges = np.hstack([np.zeros((len(cuts), 1), np.int64), cuts, np.full((len(cuts), 1), n)])
    d = np.diff(edges, axis=1) * grid_step
    totals = np.sum(energy(d, instance.link), axis=1)
    best = d[int(np.argmin(totals))]
    starts = np.concatenate(([0.0], np.cumsum(best[:-1])))
    return build_schedule(best, starts, instance.link)
