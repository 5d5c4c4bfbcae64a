# diagnostics/schedule.py

"""
Finite schedules replacing sup over all n, m >= N, and the error they leave.

Between schedule entries a < n < b, W1(e_a, e_n) <= diam * (H_n - H_a) with H
the harmonic numbers, because each step moves the empirical measure by at most
diam / (k + 1). A pair (n, m) off the schedule is therefore within
2 * diam * max(H_b - H_a) of a scheduled pair.
"""

import logging
import math
from typing import Iterable, List, Sequence

import numpy as np
from scipy.special import digamma

from src.core.errors import InputError

logger = logging.getLogger(__name__)


def geometric_schedule(N: int, M: int, ratio: float = 1.2) -> List[int]:
    """
    Integers N = s_0 < s_1 < ... < s_k = M with s_{i+1} <= ceil(ratio * s_i).

    Raises:
        InputError: N < 1, N > M or ratio <= 1
    """
    if N < 1:
        raise InputError("N must be at least 1")
    if N > M:
        raise InputError(f"N = {N} exceeds M = {M}")
    if ratio <= 1.0:
        raise InputError("schedule ratio must exceed 1")
    schedule = [int(N)]
    while schedule[-1] < M:
        schedule.append(min(int(M), max(schedule[-1] + 1, math.ceil(schedule[-1] * ratio))))
    return schedule


def merge_schedules(*schedules: Iterable[int]) -> List[int]:
    """Sorted union of several schedules"""
    return sorted({int(s) for schedule in schedules for s in schedule})


def validate_schedule(schedule: Sequence[int], N: int, M: int) -> None:
    """
    Raises:
        InputError: schedule not strictly increasing, outside [N, M], or missing N or M
    """
    if N > M:
        raise InputError(f"N = {N} exceeds M = {M}")
    if len(schedule) == 0 or schedule[0] != N or schedule[-1] != M:
        raise InputError(f"schedule must start at N = {N} and end at M = {M}")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise InputError("schedule must be strictly increasing")


def harmonic_gap(a: float, b: float) -> float:
    """H_b - H_a = sum over a <= k < b of 1/(k + 1)"""
    return float(digamma(b + 1.0) - digamma(a + 1.0))


def interpolation_bound(schedule: Sequence[float], diam: float,
                        continuous_time: bool = False) -> float:
    """
    Bound on sup over [N, M]^2 minus the max over schedule pairs.

    For continuous-time averages W1(e_a, e_t) <= diam * (1 - a/t), which
    replaces the harmonic gap.
    """
    if len(schedule) < 2:
        return 0.0
    s = np.asarray(schedule, dtype=float)
    if continuous_time:
        gaps = 1.0 - s[:-1] / s[1:]
    else:
        gaps = digamma(s[1:] + 1.0) - digamma(s[:-1] + 1.0)
    return float(2.0 * diam * gaps.max())
