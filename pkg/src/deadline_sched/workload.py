"""Random arrival sequences and harvest profiles for Monte-Carlo runs.

Randomness comes from numpy's PCG64 ``Generator``.  Each trial gets its
own stream seeded by ``(seed, trial, stream)`` through ``SeedSequence``, so
trials are reproducible independently of how they are scheduled, and the
arrival and harvest draws of a trial never share a stream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .energy import ArrivalSequence, DomainError, ProblemInstance, ScheduleError
from .harvest import HarvestProfile

ARRIVAL_STREAM = 0
HARVEST_STREAM = 1
MAX_REDRAWS = 10_000


class WorkloadError(ScheduleError):
    pass


@dataclass(frozen=True)
class WorkloadSpec:
    """Generator parameters.  ``None`` means, per instance, ``T/P`` for the
    arrival mean and ``T/(N+1)`` for the harvest epoch gap."""

    arrival_mean: float | None = None
    harvest_epoch_count: int = 0
    harvest_epoch_mean_gap: float | None = None
    harvest_amount_mean: float = 0.010
    battery_capacity: float = math.inf
    initial_charge: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.arrival_mean is not None and not self.arrival_mean > 0:
            raise DomainError("arrival_mean must be positive")
        if self.harvest_epoch_mean_gap is not None and not self.harvest_epoch_mean_gap > 0:
            raise DomainError("harvest_epoch_mean_gap must be positive")
        if self.harvest_epoch_count < 0:
            raise DomainError("harvest_epoch_count must be non-negative")
        if not self.harvest_amount_mean >= 0:
            raise DomainError("harvest_amount_mean must be non-negative")

    def with_seed(self, seed: int) -> "WorkloadSpec":
        return replace(self, seed=seed)


def trial_rng(seed: int, trial: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, trial, stream])))


def gen_arrivals(
    instance: ProblemInstance, spec: WorkloadSpec, trial: int = 0, rng: np.random.Generator | None = None
) -> ArrivalSequence:
    """Exponential gaps with mean ``T/P``, conditioned by whole-vector rejection on arriving before ``T``."""
    P = instance.packet_count
    T = instance.deadline
    if P == 1:
        return ArrivalSequence(np.array([T]), T)
    mean = spec.arrival_mean if spec.arrival_mean is not None else T / P
    if rng is None:
        rng = trial_rng(spec.seed, trial, ARRIVAL_STREAM)
    for _ in range(MAX_REDRAWS):
        head = rng.exponential(mean, P - 1)
        total = float(np.sum(head))
        if total < T:
            return ArrivalSequence(np.append(head, T - total), T)
    raise WorkloadError(f"no arrival vector summed below T={T} after {MAX_REDRAWS} draws")


def gen_harvest(
    instance: ProblemInstance, spec: WorkloadSpec, trial: int = 0, rng: np.random.Generator | None = None
) -> HarvestProfile:
    """``N`` harvest epochs with exponential gaps (mean ``T/(N+1)``) and exponential amounts."""
    N = spec.harvest_epoch_count
    T = instance.deadline
    if N == 0:
        return HarvestProfile(np.empty(0), np.empty(0), spec.battery_capacity, spec.initial_charge)
    gap = spec.harvest_epoch_mean_gap if spec.harvest_epoch_mean_gap is not None else T / (N + 1)
    if rng is None:
        rng = trial_rng(spec.seed, trial, HARVEST_STREAM)
    for _ in range(MAX_REDRAWS):
        times = np.cumsum(rng.exponential(gap, N))
        if times[-1] < T and np.all(np.diff(times) > 0) and times[0] > 0:
            break
    else:
        raise WorkloadError(f"no harvest epochs fit before T={T} after {MAX_REDRAWS} draws")
    amounts = rng.exponential(spec.harvest_amount_mean, N) if spec.harvest_amount_mean > 0 else np.zeros(N)
    return HarvestProfile(times, amounts, spec.battery_capacity, spec.initial_charge)
