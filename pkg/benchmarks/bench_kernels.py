"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 200]
"""
import argparse
import timeit

import numpy as np

from deadline_sched import _kernels_py
from deadline_sched.workload import WorkloadSpec, gen_arrivals, gen_harvest
from deadline_sched.energy import LinkParams, ProblemInstance, energy

try:
    from deadline_sched import _kernels_c
except ImportError:
    _kernels_c = None


def cases(P):
    inst = ProblemInstance(P, 100.0, LinkParams(5e5, 1e-19, 1e6))
    spec = WorkloadSpec(harvest_epoch_count=20, harvest_amount_mean=1e-12)
    gaps = np.array(gen_arrivals(inst, spec, 0).gaps)
    harvest = gen_harvest(inst, spec, 0)
    t = _kernels_py.on_durations(gaps, inst.deadline)
    starts = _kernels_py.on_starts(gaps, t)
    powers = energy(t, inst.link) / t
    return {
        "opt_durations": lambda k: k.opt_durations(gaps),
        "on_durations": lambda k: k.on_durations(gaps, inst.deadline),
        "on_starts": lambda k: k.on_starts(gaps, t),
        "eh_walk": lambda k: k.eh_walk(
            starts, starts + t, powers, harvest.timestamps, harvest.amounts, np.inf, 0.0
        ),
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=200)
    parser.add_argument("--packets", type=int, nargs="+", default=[50, 200, 400])
    args = parser.parse_args()
    if _kernels_c is None:
        print("compiled kernels not built; only the fallback is timed")
    print(f"{'kernel':<14} {'P':>5} {'python us':>11} {'cython us':>11} {'speedup':>8}")
    for P in args.packets:
        for name, call in cases(P).items():
            py = timeit.timeit(lambda: call(_kernels_py), number=args.repeat) / args.repeat * 1e6
            if _kernels_c is None:
                print(f"{name:<14} {P:>5} {py:>11.1f} {'-':>11} {'-':>8}")
                continue
            c = timeit.timeit(lambda: call(_kernels_c), number=args.repeat) / args.repeat * 1e6
            print(f"{name:<14} {P:>5} {py:>11.1f} {c:>11.1f} {py / c:>7.1f}x")


if __name__ == "__main__":
    main()
