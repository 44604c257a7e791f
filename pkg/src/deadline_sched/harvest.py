"""Grid + energy-harvesting scheduler.

Transmission durations and powers are exactly those of the causal
scheduler; the only decision is which source feeds each instant.  The
battery is drained first and the grid takes over only while the battery is
empty.  Harvest arrivals top the battery up to its capacity and the excess
is lost.  The ledger is computed exactly at event breakpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .energy import ArrivalSequence, DomainError, ProblemInstance, Schedule, ScheduleError
from .online import on_schedule, ratio_bound
from .offline import opt_schedule

SURROGATE_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class HarvestProfile:
    """Harvest events as parallel ``timestamps``/``amounts`` arrays plus battery state.

    ``battery_capacity`` may be ``math.inf`` for a battery that never overflows.
    """

    timestamps: np.ndarray
    amounts: np.ndarray
    battery_capacity: float = math.inf
    initial_charge: float = 0.0

    def __post_init__(self):
        ts = np.array(self.timestamps, dtype=np.float64).reshape(-1)
        am = np.array(self.amounts, dtype=np.float64).reshape(-1)
        if ts.shape != am.shape:
            raise DomainError("timestamps and amounts must have the same length")
        if np.any(np.diff(ts) <= 0):
            raise DomainError("harvest timestamps must be strictly increasing")
        if np.any(ts < 0):
            raise DomainError("harvest timestamps must be non-negative")
        if np.any(~(am >= 0)):
            raise DomainError("harvest amounts must be non-negative")
        if not self.battery_capacity >= 0:
            raise DomainError("battery capacity must be non-negative")
        if not 0 <= self.initial_charge <= self.battery_capacity:
            raise DomainError("initial charge must lie in [0, battery_capacity]")
        ts.setflags(write=False)
        am.setflags(write=False)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "amounts", am)

    @classmethod
    def empty(cls, battery_capacity: float = math.inf) -> "HarvestProfile":
        return cls(np.empty(0), np.empty(0), battery_capacity)

    @property
    def events(self) -> list[tuple[float, float]]:
        return list(zip(self.timestamps.tolist(), self.amounts.tolist()))

    @property
    def total(self) -> float:
        """All free energy: initial charge plus every harvest amount."""
        return self.initial_charge + float(np.sum(self.amounts))

    def window_total(self, start: float, end: float) -> float:
        """Harvest arriving in ``[start, end)``."""
        mask = (self.timestamps >= start) & (self.timestamps < end)
        return float(np.sum(self.amounts[mask]))


@dataclass(frozen=True, eq=False)
class EnergyLedger:
    grid_per_packet: np.ndarray
    harvested_used_per_packet: np.ndarray
    battery_at_packet_start: np.ndarray
    battery_trajectory: list
    wasted_overflow: float
    final_level: float
    grid_intervals: list

    @property
    def total_grid(self) -> float:
        return float(np.sum(self.grid_per_packet))

    @property
    def total_harvested_used(self) -> float:
        return float(np.sum(self.harvested_used_per_packet))

    def to_dict(self) -> dict:
        return {
            "grid_per_packet": self.grid_per_packet.tolist(),
            "harvested_used_per_packet": self.harvested_used_per_packet.tolist(),
            "battery_at_packet_start": self.battery_at_packet_start.tolist(),
            "battery_trajectory": [list(p) for p in self.battery_trajectory],
            "wasted_overflow": self.wasted_overflow,
            "final_level": self.final_level,
            "grid_intervals": [[a, b, int(i)] for a, b, i in self.grid_intervals],
            "total_grid": self.total_grid,
        }


def ledger_for(schedule: Schedule, harvest: HarvestProfile) -> EnergyLedger:
    used, b_start, wasted, final, traj, grid = _backend.kernels.eh_walk(
        schedule.starts,
        schedule.finishes,
        schedule.per_packet_power,
        harvest.timestamps,
        harvest.amounts,
        float(harvest.battery_capacity),
        float(harvest.initial_charge),
    )
    grid_energy = np.maximum(schedule.per_packet_energy - used, 0.0)
    return EnergyLedger(
        grid_per_packet=grid_energy,
        harvested_used_per_packet=np.asarray(used),
        battery_at_packet_start=np.asarray(b_start),
        battery_trajectory=traj,
        wasted_overflow=float(wasted),
        final_level=float(final),
        grid_intervals=grid,
    )


def eh_on_schedule(
    arrivals: ArrivalSequence, harvest: HarvestProfile, instance: ProblemInstance
) -> tuple[Schedule, EnergyLedger]:
    schedule = on_schedule(arrivals, instance)
    return schedule, ledger_for(schedule, harvest)


def eh_nondegeneracy_check(
    arrivals: ArrivalSequence, harvest: HarvestProfile, instance: ProblemInstance
) -> bool:
    """True when harvested energy alone cannot cover the offline optimum's energy."""
    e_opt = float(np.sum(opt_schedule(arrivals, instance).per_packet_energy))
    return e_opt - harvest.total > 0


def eh_assumption_margin(
    instance: ProblemInstance, arrivals: ArrivalSequence, mean_half_window_energy: float
) -> float:
    """Smallest ``m`` with ``eta <= (m - 1) E_opt / (2 m)``, i.e. ``E_opt / (E_opt - 2 eta)``."""
    eta = mean_half_window_energy
    if eta < 0:
        raise DomainError("mean half-window energy must be non-negative")
    e_opt = float(np.sum(opt_schedule(arrivals, instance).per_packet_energy))
    if eta >= e_opt / 2:
        raise ScheduleError(
            f"assumption unsatisfiable: half-window harvest {eta:.6g} J >= E_opt/2 = {e_opt / 2:.6g} J"
        )
    return e_opt / (e_opt - 2 * eta)


def eh_ratio_bound(margin: float, packet_count: int) -> float:
    return margin * ratio_bound(packet_count)


def grid_cr_surrogate(
    arrivals: ArrivalSequence,
    harvest: HarvestProfile,
    instance: ProblemInstance,
    check: bool = True,
) -> float:
    """Grid energy of the greedy scheduler over a lower bound on the optimal grid energy.

    The lower bound assumes all harvested energy were available at time 0,
    so the returned value over-estimates the true ratio.
    """
    e_opt = float(np.sum(opt_schedule(arrivals, instance).per_packet_energy))
    if check and not e_opt - harvest.total > 0:
        raise ScheduleError("degenerate: harvested energy covers the offline optimum")
    _, ledger = eh_on_schedule(arrivals, harvest, instance)
    return ledger.total_grid / max(SURROGATE_EPS * e_opt, e_opt - harvest.total)
