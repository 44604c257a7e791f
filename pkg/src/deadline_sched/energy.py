"""Problem instance, arrival sequence and schedule types plus the rate-energy function.

Energy to push ``B`` bits over an AWGN link of bandwidth ``W`` and noise
density ``N0`` in ``t`` seconds is ``N0 * W * t * (2**(B / (t * W)) - 1)``.
It is strictly decreasing and convex in ``t``.  All times are seconds and all
energies joules.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

LN2 = math.log(2.0)
# expm1 overflows past this exponent
_MAX_EXPONENT = math.log(np.finfo(np.float64).max) - 1.0
SUM_RTOL = 1e-9
MIN_DURATION_RTOL = 1e-12


class ScheduleError(ValueError):
    """Base class for invalid inputs to the schedulers."""


class DomainError(ScheduleError):
    pass


class SaturationError(ScheduleError):
    """Raised when a duration is so short its energy overflows a double."""


class ArrivalError(ScheduleError):
    """An arrival sequence violates one of its invariants.

    ``rule`` names the violated invariant: ``"length"``, ``"negative_gap"``,
    ``"sum_mismatch"`` or ``"last_arrival_at_deadline"``.
    """

    def __init__(self, rule: str, message: str):
        super().__init__(message)
        self.rule = rule


def _frozen(values, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LinkParams:
    bits_per_packet: float = 1.0
    noise_density: float = 1.0
    bandwidth: float = 1.0

    def __post_init__(self):
        for name in ("bits_per_packet", "noise_density", "bandwidth"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class ProblemInstance:
    packet_count: int
    deadline: float
    link: LinkParams = field(default_factory=LinkParams)

    def __post_init__(self):
        if int(self.packet_count) != self.packet_count or self.packet_count < 1:
            raise DomainError(f"packet_count must be a positive integer, got {self.packet_count!r}")
        if not (math.isfinite(self.deadline) and self.deadline > 0):
            raise DomainError(f"deadline must be positive, got {self.deadline!r}")

    @property
    def min_duration(self) -> float:
        return MIN_DURATION_RTOL * self.deadline


@dataclass(frozen=True, eq=False)
class ArrivalSequence:
    """Inter-arrival gaps ``a_1..a_P``; packet 0 arrives at time 0.

    ``gaps[P-1]`` is the tail gap between the last arrival and the deadline.
    Build through :func:`validate_arrivals` to get the invariants checked.
    """

    gaps: np.ndarray
    deadline: float

    def __post_init__(self):
        object.__setattr__(self, "gaps", _frozen(self.gaps))

    def __len__(self):
        return len(self.gaps)

    def __eq__(self, other):
        if not isinstance(other, ArrivalSequence):
            return NotImplemented
        return self.deadline == other.deadline and np.array_equal(self.gaps, other.gaps)

    @property
    def arrival_times(self) -> np.ndarray:
        """Arrival instant of each packet: 0, a_1, a_1 + a_2, ..."""
        out = np.empty(len(self.gaps))
        out[0] = 0.0
        np.cumsum(self.gaps[:-1], out=out[1:])
        return out

    def is_decreasing(self, rtol: float = 0.0) -> bool:
        g = self.gaps
        return bool(np.all(g[1:] <= g[:-1] * (1 + rtol) + rtol * self.deadline))


@dataclass(frozen=True, eq=False)
class Schedule:
    durations: np.ndarray
    starts: np.ndarray
    finishes: np.ndarray
    per_packet_energy: np.ndarray
    per_packet_power: np.ndarray

    def __post_init__(self):
        for name in ("durations", "starts", "finishes", "per_packet_energy", "per_packet_power"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def __len__(self):
        return len(self.durations)

    @property
    def idle_time(self) -> float:
        if len(self.starts) < 2:
            return 0.0
        return float(np.sum(np.maximum(self.starts[1:] - self.finishes[:-1], 0.0)))

    def to_dict(self) -> dict:
        return {
            "durations": self.durations.tolist(),
            "starts": self.starts.tolist(),
            "finishes": self.finishes.tolist(),
            "per_packet_energy": self.per_packet_energy.tolist(),
            "per_packet_power": self.per_packet_power.tolist(),
            "total_energy": float(np.sum(self.per_packet_energy)),
        }


def energy(duration, link: LinkParams):
    """Energy (J) needed to send one packet in ``duration`` seconds.

    Accepts a scalar or an array of durations.  Non-positive durations raise
    :class:`DomainError`; durations short enough to overflow raise
    :class:`SaturationError`.
    """
    t = np.asarray(duration, dtype=np.float64)
    if np.any(~(t > 0)):
        raise DomainError(f"duration must be positive, got {duration!r}")
    exponent = (link.bits_per_packet / link.bandwidth) / t * LN2
    if np.any(exponent > _MAX_EXPONENT):
        raise SaturationError(
            f"duration {float(np.min(t)):.3g} s is infeasibly short for "
            f"{link.bits_per_packet:g} bits at {link.bandwidth:g} Hz"
        )
    out = link.noise_density * link.bandwidth * t * np.expm1(exponent)
    return float(out) if out.ndim == 0 else out


def energy_slope(duration, link: LinkParams):
    """Derivative of :func:`energy` with respect to the duration (always negative)."""
    t = np.asarray(duration, dtype=np.float64)
    x = (link.bits_per_packet / link.bandwidth) / t * LN2
    out = link.noise_density * link.bandwidth * (np.expm1(x) - x * np.exp(x))
    return float(out) if out.ndim == 0 else out


def total_energy(schedule: Schedule, link: LinkParams) -> float:
    return float(np.sum(energy(schedule.durations, link)))


def validate_arrivals(gaps: Sequence[float], instance: ProblemInstance) -> ArrivalSequence:
    g = np.asarray(gaps, dtype=np.float64)
    T = instance.deadline
    P = instance.packet_count
    if g.ndim != 1 or len(g) != P:
        raise ArrivalError("length", f"expected {P} gaps, got {g.size}")
    if not np.all(np.isfinite(g)):
        raise ArrivalError("negative_gap", "gaps must be finite")
    if np.any(g < 0):
        i = int(np.argmax(g < 0))
        raise ArrivalError("negative_gap", f"gap a_{i + 1} = {g[i]!r} is negative")
    total = float(np.sum(g))
    if abs(total - T) > SUM_RTOL * T:
        raise ArrivalError("sum_mismatch", f"gaps sum to {total!r}, expected deadline {T!r}")
    if float(np.sum(g[:-1])) >= T:
        raise ArrivalError(
            "last_arrival_at_deadline", "the last packet must arrive strictly before the deadline"
        )
    return ArrivalSequence(g, T)


def build_schedule(durations, starts, link: LinkParams) -> Schedule:
    durations = np.asarray(durations, dtype=np.float64)
    starts = np.asarray(starts, dtype=np.float64)
    e = energy(durations, link)
    e = np.atleast_1d(e)
    return Schedule(
        durations=durations,
        starts=starts,
        finishes=starts + durations,
        per_packet_energy=e,
        per_packet_power=e / durations,
    )


def check_schedule(schedule: Schedule, arrivals: ArrivalSequence, link: LinkParams) -> list[str]:
    """Return the list of violated schedule invariants (empty when valid)."""
    T = arrivals.deadline
    tol = SUM_RTOL * T
    problems = []
    if not np.allclose(schedule.finishes, schedule.starts + schedule.durations, rtol=0, atol=tol):
        problems.append("finish != start + duration")
    if np.any(schedule.starts < arrivals.arrival_times - tol):
        problems.append("packet starts before it arrives")
    if np.any(schedule.starts[1:] < schedule.finishes[:-1] - tol):
        problems.append("transmissions overlap")
    if schedule.finishes[-1] > T + tol:
        problems.append("last packet finishes after the deadline")
    e = energy(schedule.durations, link)
    if not np.allclose(schedule.per_packet_energy, e, rtol=1e-12, atol=0):
        problems.append("per-packet energy does not match durations")
    if not np.allclose(schedule.per_packet_power, e / schedule.durations, rtol=1e-12, atol=0):
        problems.append("per-packet power does not match energy / duration")
    return problems
