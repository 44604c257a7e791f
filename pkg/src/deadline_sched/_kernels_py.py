"""Pure-Python/numpy versions of the scheduler kernels.

Same signatures and semantics as the compiled ``_kernels_c`` module; used
when the extension is not built or ``DEADLINE_SCHED_PURE=1`` is set.
"""
import numpy as np


def opt_groups(gaps, rel_tol=1e-12):
    """Group boundaries of the offline optimum.

    Starting after the previous group, take the prefix with the largest mean
    gap (the longest one among near-ties) as the next group.  Returns
    ``(ends, means)``: 1-based end index and common duration of each group.
    """
    a = np.asarray(gaps, dtype=np.float64)
    n = len(a)
    ends = []
    means = []
    k0 = 0
    while k0 < n:
        sums = np.cumsum(a[k0:])
        avgs = sums / np.arange(1, n - k0 + 1)
        best = avgs.max()
        k = int(np.flatnonzero(avgs >= best - rel_tol * abs(best))[-1]) + 1
        ends.append(k0 + k)
        means.append(sums[k - 1] / k)
        k0 += k
    return np.array(ends, dtype=np.int64), np.array(means, dtype=np.float64)


def opt_durations(gaps, rel_tol=1e-12):
    ends, means = opt_groups(gaps, rel_tol)
    counts = np.diff(np.concatenate(([0], ends)))
    return np.repeat(means, counts)


def on_durations(gaps, deadline):
    """Durations of the causal scheduler: running min of remaining-time / remaining-packets."""
    a = np.asarray(gaps, dtype=np.float64)
    n = len(a)
    elapsed = np.empty(n)
    elapsed[0] = 0.0
    np.cumsum(a[:-1], out=elapsed[1:])
    x = (deadline - elapsed) / np.arange(n, 0, -1)
    return np.minimum.accumulate(x)


def on_starts(gaps, durations):
    """Start times with idling: a packet starts at max(previous finish, its arrival)."""
    n = len(durations)
    starts = np.empty(n)
    arrival = 0.0
    finish = 0.0
    for i in range(n):
        if i > 0:
            arrival += gaps[i - 1]
        s = finish if finish > arrival else arrival
        starts[i] = s
        finish = s + durations[i]
    return starts


def eh_walk(starts, finishes, powers, ev_times, ev_amounts, capacity, initial):
    """Battery-first energy sourcing at a fixed per-packet power profile.

    Returns ``(used, battery_start, wasted, final_level, trajectory,
    grid_intervals)`` where ``used[i]`` is harvested energy drawn by packet
    ``i``, ``trajectory`` is a list of ``(time, level)`` breakpoints and
    ``grid_intervals`` a list of ``(start, end, packet)`` spans powered by
    the grid.
    """
    n = len(starts)
    m = len(ev_times)
    used = np.zeros(n)
    battery_start = np.zeros(n)
    level = float(initial)
    wasted = 0.0
    trajectory = [(0.0, level)]
    grid = []
    j = 0

    def credit(tau, amount):
        nonlocal level, wasted
        trajectory.append((tau, level))
        new = level + amount
        if new > capacity:
            wasted += new - capacity
            new = capacity
        level = new
        trajectory.append((tau, level))

    for i in range(n):
        s = starts[i]
        f = finishes[i]
        rate = powers[i]
        while j < m and ev_times[j] <= s:
            credit(ev_times[j], ev_amounts[j])
            j += 1
        battery_start[i] = level
        trajectory.append((s, level))
        cursor = s
        drawn = 0.0
        while True:
            if j < m and ev_times[j] < f:
                stop = ev_times[j]
            else:
                stop = f
            need = rate * (stop - cursor)
            if level >= need:
                level -= need
                drawn += need
                trajectory.append((stop, level))
            else:
                empty_at = cursor + level / rate
                drawn += level
                level = 0.0
                trajectory.append((empty_at, 0.0))
                if stop > empty_at:
                    grid.append((empty_at, stop, i))
                    trajectory.append((stop, 0.0))
            cursor = stop
            if stop == f:
                break
            credit(ev_times[j], ev_amounts[j])
            j += 1
        used[i] = drawn
    while j < m:
        credit(ev_times[j], ev_amounts[j])
        j += 1
    return used, battery_start, wasted, level, trajectory, grid
