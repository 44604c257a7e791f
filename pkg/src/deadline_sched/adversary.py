"""Adversarial arrival sequences for the causal scheduler.

``worst_case_search`` is a heuristic hill climb, not a certificate: it
follows finite-difference gradients of the per-sequence ratio over the
simplex of gap vectors and keeps the best point found.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import ArrivalSequence, DomainError, ProblemInstance, SaturationError
from .offline import opt_transform
from .online import ratio_from_gaps
from .workload import trial_rng

TAIL_FLOOR = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 8
    step_size: float = 0.05
    fd_epsilon: float = 1e-6
    max_iters: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise DomainError("restarts and max_iters must be positive")
        if not 0 < self.fd_epsilon < self.step_size:
            raise DomainError("need 0 < fd_epsilon < step_size")


@dataclass(frozen=True)
class SearchResult:
    arrivals: ArrivalSequence
    ratio: float
    transformed_ratio: float
    converged: bool
    restart_ratios: tuple

    def __iter__(self):
        return iter((self.arrivals, self.ratio))


def _safe_ratio(gaps, instance) -> float:
    try:
        return ratio_from_gaps(gaps, instance)
    except SaturationError:
        return -math.inf


def _project(gaps: np.ndarray, T: float) -> np.ndarray:
    g = np.maximum(gaps, 0.0)
    g *= T / np.sum(g)
    floor = TAIL_FLOOR * T
    if g[-1] < floor:
        head = g[:-1] * ((T - floor) / np.sum(g[:-1]))
        g = np.append(head, floor)
    return g


def _gradient(gaps: np.ndarray, instance: ProblemInstance, base: float, eps: float) -> np.ndarray:
    """Directional differences along ``e_i - e_P``; the tail gap absorbs every move."""
    P = len(gaps)
    grad = np.zeros(P)
    floor = TAIL_FLOOR * instance.deadline
    for i in range(P - 1):
        probe = gaps.copy()
        if gaps[-1] - eps > floor:
            probe[i] += eps
            probe[-1] -= eps
            grad[i] = (_safe_ratio(probe, instance) - base) / eps
        elif gaps[i] > eps:
            probe[i] -= eps
            probe[-1] += eps
            grad[i] = (base - _safe_ratio(probe, instance)) / eps
    grad[~np.isfinite(grad)] = 0.0
    grad[-1] = -np.sum(grad[:-1])
    return grad


def _climb(start: np.ndarray, instance: ProblemInstance, config: SearchConfig):
    T = instance.deadline
    eps = config.fd_epsilon * T
    step = config.step_size * T
    x = _project(start, T)
    fx = _safe_ratio(x, instance)
    history = [fx]
    converged = False
    for _ in range(config.max_iters):
        g = _gradient(x, instance, fx, eps)
        norm = float(np.linalg.norm(g))
        if norm == 0.0:
            converged = True
            break
        y = _project(x + step * g / norm, T)
        fy = _safe_ratio(y, instance)
        if fy > fx:
            x, fx = y, fy
            history.append(fx)
        else:
            step *= 0.5
            if step < eps:
                converged = True
                break
    return x, fx, converged, history


def worst_case_search(instance: ProblemInstance, config: SearchConfig = SearchConfig()) -> SearchResult:
    """Multi-start projected hill climb on the per-sequence competitive ratio.

    Even restarts start from exponential gap samples, odd restarts from the
    offline-optimal transform of such a sample (which has non-increasing
    gaps).  Restart ``r`` draws from the stream ``(seed, r)``.
    """
    P = instance.packet_count
    T = instance.deadline
    if P == 1:
        arr = ArrivalSequence(np.array([T]), T)
        return SearchResult(arr, 1.0, 1.0, True, (1.0,))
    best_x, best_f = None, -math.inf
    all_converged = True
    ratios = []
    for r in range(config.restarts):
        rng = trial_rng(config.seed, r, 0)
        start = rng.exponential(T / P, P)
        start *= T / start.sum()
        if r % 2 == 1:
            start = np.array(opt_transform(ArrivalSequence(start, T), instance).gaps)
        x, fx, converged, _ = _climb(start, instance, config)
        all_converged &= converged
        ratios.append(fx)
        if fx > best_f:
            best_x, best_f = x, fx
    arrivals = ArrivalSequence(best_x, T)
    transformed = ratio_from_gaps(np.array(opt_transform(arrivals, instance).gaps), instance)
    return SearchResult(arrivals, best_f, transformed, all_converged, tuple(ratios))


def project_to_decreasing(
    arrivals: ArrivalSequence, instance: ProblemInstance | None = None
) -> ArrivalSequence:
    """Map a sequence to one with non-increasing gaps, same optimal energy, no smaller ratio."""
    return opt_transform(arrivals, instance)


def unknown_p_lower_bound(bits: float, b0_grid: int = 4096) -> float:
    """Ratio any online scheduler must concede when it does not know whether P is 1 or 2.

    With ``T = 1`` and a possible second arrival at ``1/2``, the scheduler
    commits to sending ``B0`` bits by ``1/2``.  Returns the minimum over a
    uniform grid of ``B0`` in ``[0, B]`` of the worse of the two ratios.
    """
    if not bits > 0:
        raise DomainError("bits must be positive")
    B = float(bits)
    b0 = np.linspace(0.0, B, b0_grid + 1)
    first = 0.5 * np.expm1(2 * b0 * math.log(2))
    single = (first + 0.5 * np.expm1(2 * np.maximum(B - b0, 0.0) * math.log(2))) / math.expm1(B * math.log(2))
    double = (first + 0.5 * np.expm1(2 * (2 * B - b0) * math.log(2))) / math.expm1(2 * B * math.log(2))
    return float(np.min(np.maximum(single, double)))

