# diagnostics/divergence.py

"""
Finite-horizon divergence functionals between two systems.

For every sample point x and scheduled pair (n, m) the table entry is
W1(e_n^h(x), e_m^g(x)). Averaging the per-point maxima gives delta_e; taking
the maximum of the per-pair averages gives delta_l1. Both come from the same
table, so delta_l1 <= delta_e holds exactly on identical inputs.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.errors import InputError
from src.core.worker_pool import ordered_map
from src.empirics import empirical_path, path_w1_matrix
from src.phase_space import Point, diameter
from src.systems import OrbitBudget, SystemSpec

from .schedule import geometric_schedule, interpolation_bound, merge_schedules, validate_schedule

logger = logging.getLogger(__name__)

NON_STATISTICAL = "NON_STATISTICAL_AT_HORIZON"
NOT_FLAGGED = "NOT_FLAGGED_AT_HORIZON"


class DivergenceKind(str, Enum):
    DELTA_E = "delta_e"
    DELTA_L1 = "delta_l1"


class DivergenceEstimate(BaseModel):
    """Finite-horizon value of a divergence functional with its estimation parameters"""
    model_config = ConfigDict(frozen=True)

    kind: DivergenceKind
    N: int = Field(ge=1)
    M: int = Field(ge=1)
    sample_size: int = Field(ge=1)
    seed: Optional[int] = None
    value: float = Field(ge=0.0)
    schedule_length: int = Field(ge=1)
    interpolation_bound: float = Field(default=0.0, ge=0.0)
    mesh_error: float = Field(default=0.0, ge=0.0)

    @model_validator(mode='after')
    def _horizons(self) -> 'DivergenceEstimate':
        if self.N > self.M:
            raise ValueError(f"N = {self.N} exceeds M = {self.M}")
        return self


def _table_task(task: Tuple[SystemSpec, SystemSpec, Optional[Point], List[int],
                            Optional[OrbitBudget], Optional[float]]) -> np.ndarray:
    spec_h, spec_g, x, schedule, budget, mesh = task
    path_h = empirical_path(spec_h, x, schedule, budget)
    path_g = path_h if spec_g == spec_h else empirical_path(spec_g, x, schedule, budget)
    return path_w1_matrix(path_h, path_g, mesh)


def divergence_table(spec_h: SystemSpec, spec_g: SystemSpec, sample: Sequence[Optional[Point]],
                     schedule: Sequence[int], budget: Optional[OrbitBudget] = None,
                     mesh: Optional[float] = None, workers: int = 1) -> np.ndarray:
    """
    (P, S, S) array of W1(e_{s_i}^h(x_p), e_{s_j}^g(x_p)).

    Raises:
        InputError: systems on different spaces or an empty sample
    """
    if spec_h.space != spec_g.space:
        raise InputError(f"{spec_h.label} and {spec_g.label} live on different spaces")
    if len(sample) == 0:
        raise InputError("sample must be nonempty")
    schedule = [int(s) for s in schedule]
    tasks = [(spec_h, spec_g, x, schedule, budget, mesh) for x in sample]
    tables = ordered_map(_table_task, tasks, workers)
    return np.stack(tables)


def _mesh_error(spec: SystemSpec, mesh: Optional[float]) -> float:
    return float(mesh) if mesh is not None and spec.space.is_one_dimensional else 0.0


def estimate_from_table(kind: DivergenceKind, table: np.ndarray, spec: SystemSpec, N: int, M: int,
                        schedule: Sequence[int], seed: Optional[int],
                        mesh: Optional[float]) -> DivergenceEstimate:
    """delta_e or delta_l1 over the part of a divergence table with horizons in [N, M]"""
    s = np.asarray(schedule)
    keep = (s >= N) & (s <= M)
    window = table[:, keep][:, :, keep]
    if kind == DivergenceKind.DELTA_E:
        value = float(window.max(axis=(1, 2)).mean())
    else:
        value = float(window.mean(axis=0).max())
    return DivergenceEstimate(
        kind=kind,
        N=N,
        M=M,
        sample_size=table.shape[0],
        seed=seed,
        value=value,
        schedule_length=int(keep.sum()),
        interpolation_bound=interpolation_bound(s[keep], diameter(spec.space)),
        mesh_error=_mesh_error(spec, mesh),
    )


def _schedule(N: int, M: int, ratio: float, schedule: Optional[Sequence[int]]) -> List[int]:
    schedule = list(schedule) if schedule is not None else geometric_schedule(N, M, ratio)
    validate_schedule(schedule, N, M)
    return schedule


def delta_e_estimate(spec_h: SystemSpec, spec_g: SystemSpec, N: int, M: int,
                     sample: Sequence[Optional[Point]], budget: Optional[OrbitBudget] = None,
                     seed: Optional[int] = None, ratio: float = 1.2,
                     mesh: Optional[float] = None, schedule: Optional[Sequence[int]] = None,
                     workers: int = 1) -> DivergenceEstimate:
    """Sample average of the per-point max over scheduled (n, m) of W1(e_n^h(x), e_m^g(x))"""
    schedule = _schedule(N, M, ratio, schedule)
    table = divergence_table(spec_h, spec_g, sample, schedule, budget, mesh, workers)
    return estimate_from_table(DivergenceKind.DELTA_E, table, spec_h, N, M, schedule, seed, mesh)


def delta_l1_estimate(spec_h: SystemSpec, spec_g: SystemSpec, N: int, M: int,
                      sample: Sequence[Optional[Point]], budget: Optional[OrbitBudget] = None,
                      seed: Optional[int] = None, ratio: float = 1.2,
                      mesh: Optional[float] = None, schedule: Optional[Sequence[int]] = None,
                      workers: int = 1) -> DivergenceEstimate:
    """Max over scheduled (i, j) of the sample average of W1(e_i^h(x), e_j^g(x))"""
    schedule = _schedule(N, M, ratio, schedule)
    table = divergence_table(spec_h, spec_g, sample, schedule, budget, mesh, workers)
    return estimate_from_table(DivergenceKind.DELTA_L1, table, spec_h, N, M, schedule, seed, mesh)


@dataclass
class DivergenceCurve:
    """Estimates for a list of N sharing one schedule and one table"""
    kind: DivergenceKind
    estimates: List[DivergenceEstimate]
    table: np.ndarray
    schedule: List[int]

    @property
    def points(self) -> List[Tuple[int, float]]:
        return [(e.N, e.value) for e in self.estimates]

    def is_nonincreasing(self) -> bool:
        values = [e.value for e in self.estimates]
        return all(b <= a for a, b in zip(values, values[1:]))


def divergence_curve(spec_h: SystemSpec, spec_g: SystemSpec, N_list: Sequence[int], M: int,
                     sample: Sequence[Optional[Point]], budget: Optional[OrbitBudget] = None,
                     seed: Optional[int] = None, ratio: float = 1.2,
                     mesh: Optional[float] = None, workers: int = 1,
                     kind: DivergenceKind = DivergenceKind.DELTA_E) -> DivergenceCurve:
    """
    N -> estimate for every N in N_list.

    Every N restricts the same table, so the delta_e curve is nonincreasing
    in N exactly.
    """
    N_list = [int(n) for n in N_list]
    if not N_list or any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise InputError("N_list must be nonempty and strictly increasing")
    if N_list[-1] > M:
        raise InputError(f"largest N = {N_list[-1]} exceeds M = {M}")
    schedule = merge_schedules(geometric_schedule(N_list[0], M, ratio), N_list)
    table = divergence_table(spec_h, spec_g, sample, schedule, budget, mesh, workers)
    estimates = [estimate_from_table(kind, table, spec_h, N, M, schedule, seed, mesh) for N in N_list]
    return DivergenceCurve(kind=kind, estimates=estimates, table=table, schedule=schedule)


@dataclass
class NonStatisticalVerdict:
    verdict: str
    threshold: float
    curve: List[Tuple[int, float]]
    M: int

    @property
    def flagged(self) -> bool:
        return self.verdict == NON_STATISTICAL

    def to_dict(self) -> Dict[str, Any]:
        return {
            'verdict': self.verdict,
            'threshold': self.threshold,
            'M': self.M,
            'curve': [{'N': n, 'value': v} for n, v in self.curve],
        }


def nonstatistical_flag(spec: SystemSpec, sample: Sequence[Optional[Point]], N_list: Sequence[int],
                        M: int, d_threshold: float = 0.05, budget: Optional[OrbitBudget] = None,
                        seed: Optional[int] = None, ratio: float = 1.2,
                        mesh: Optional[float] = None, workers: int = 1) -> NonStatisticalVerdict:
    """Flag spec when delta_e_N(f, f) exceeds d_threshold for every N in N_list"""
    curve = divergence_curve(spec, spec, N_list, M, sample, budget, seed, ratio, mesh, workers)
    flagged = all(value > d_threshold for _, value in curve.points)
    verdict = NON_STATISTICAL if flagged else NOT_FLAGGED
    logger.info(f"{spec.label}: {verdict} (threshold {d_threshold}, M = {M})")
    return NonStatisticalVerdict(verdict=verdict, threshold=d_threshold, curve=curve.points, M=M)


def triangle_terms(spec_1: SystemSpec, spec_2: SystemSpec, N: int, M: int,
                   sample: Sequence[Optional[Point]], budget: Optional[OrbitBudget] = None,
                   ratio: float = 1.2, mesh: Optional[float] = None,
                   workers: int = 1) -> Dict[str, float]:
    """
    Both sides of delta_e_N(g1, g2) <= delta_e_N(g1, g1) + delta_e_N(g2, g2)
    + d_L1(e_N^g1, e_N^g2) on one sample and schedule.
    """
    schedule = geometric_schedule(N, M, ratio)
    cross = divergence_table(spec_1, spec_2, sample, schedule, budget, mesh, workers)
    first = divergence_table(spec_1, spec_1, sample, schedule, budget, mesh, workers)
    second = divergence_table(spec_2, spec_2, sample, schedule, budget, mesh, workers)
    lhs = float(cross.max(axis=(1, 2)).mean())
    rhs = float(first.max(axis=(1, 2)).mean() + second.max(axis=(1, 2)).mean()
                + cross[:, 0, 0].mean())
    return {'lhs': lhs, 'rhs': rhs}
