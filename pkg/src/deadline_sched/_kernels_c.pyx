# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled scheduler kernels; mirrors ``_kernels_py`` exactly."""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def opt_groups(gaps, double rel_tol=1e-12):
    cdef const double[::1] a = np.ascontiguousarray(gaps, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    cdef double[::1] avgs = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ends = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] means = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t k0 = 0, k, kbest, ngroups = 0
    cdef double s, best, cut, sbest
    while k0 < n:
        s = 0.0
        best = -1.0
        for k in range(n - k0):
            s += a[k0 + k]
            avgs[k] = s / (k + 1)
            if avgs[k] > best:
                best = avgs[k]
        cut = best - rel_tol * fabs(best)
        kbest = 0
        for k in range(n - k0 - 1, -1, -1):
            if avgs[k] >= cut:
                kbest = k
                break
        sbest = 0.0
        for k in range(kbest + 1):
            sbest += a[k0 + k]
        ends[ngroups] = k0 + kbest + 1
        means[ngroups] = sbest / (kbest + 1)
        ngroups += 1
        k0 += kbest + 1
    return ends[:ngroups].copy(), means[:ngroups].copy()


def opt_durations(gaps, double rel_tol=1e-12):
    ends, means = opt_groups(gaps, rel_tol)
    cdef const cnp.int64_t[::1] e = ends
    cdef const double[::1] m = means
    cdef Py_ssize_t n = e[e.shape[0] - 1], g, i = 0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    for g in range(e.shape[0]):
        while i < e[g]:
            out[i] = m[g]
            i += 1
    return out


def on_durations(gaps, double deadline):
    cdef const double[::1] a = np.ascontiguousarray(gaps, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double elapsed = 0.0, x, t = 0.0
    for i in range(n):
        if i > 0:
            elapsed += a[i - 1]
        x = (deadline - elapsed) / (n - i)
        if i == 0 or x < t:
            t = x
        out[i] = t
    return out


def on_starts(gaps, durations):
    cdef const double[::1] a = np.ascontiguousarray(gaps, dtype=np.float64)
    cdef const double[::1] d = np.ascontiguousarray(durations, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double arrival = 0.0, finish = 0.0, s
    for i in range(n):
        if i > 0:
            arrival += a[i - 1]
        s = finish if finish > arrival else arrival
        out[i] = s
        finish = s + d[i]
    return out


def eh_walk(starts, finishes, powers, ev_times, ev_amounts, double capacity, double initial):
    cdef const double[::1] st = np.ascontiguousarray(starts, dtype=np.float64)
    cdef const double[::1] fi = np.ascontiguousarray(finishes, dtype=np.float64)
    cdef const double[::1] pw = np.ascontiguousarray(powers, dtype=np.float64)
    cdef const double[::1] et = np.ascontiguousarray(ev_times, dtype=np.float64)
    cdef const double[::1] ea = np.ascontiguousarray(ev_amounts, dtype=np.float64)
    cdef Py_ssize_t n = st.shape[0], m = et.shape[0], i, j = 0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] used = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] battery_start = np.zeros(n, dtype=np.float64)
    cdef double level = initial, wasted = 0.0, s, f, rate, cursor, stop, need, drawn, empty_at, new
    trajectory = [(0.0, level)]
    grid = []
    for i in range(n):
        s = st[i]
        f = fi[i]
        rate = pw[i]
        while j < m and et[j] <= s:
            trajectory.append((et[j], level))
            new = level + ea[j]
            if new > capacity:
                wasted += new - capacity
                new = capacity
            level = new
            trajectory.append((et[j], level))
            j += 1
        battery_start[i] = level
        trajectory.append((s, level))
        cursor = s
        drawn = 0.0
        while True:
            if j < m and et[j] < f:
                stop = et[j]
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
            trajectory.append((et[j], level))
            new = level + ea[j]
            if new > capacity:
                wasted += new - capacity
                new = capacity
            level = new
            trajectory.append((et[j], level))
            j += 1
        used[i] = drawn
    while j < m:
        trajectory.append((et[j], level))
        new = level + ea[j]
        if new > capacity:
            wasted += new - capacity
            new = capacity
        level = new
        trajectory.append((et[j], level))
        j += 1
    return used, battery_start, wasted, level, trajectory, grid
