# diagnostics/oscillation.py

"""
Per-point oscillation of empirical measures over a horizon window.

The score of x is max over scheduled n, m in [N, M] of W1(e_n(x), e_m(x)).
A point whose score stays above some d > 0 for every N is non-statistical;
a finite computation can only report what it saw up to M.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import InputError
from src.empirics import empirical_path, path_w1_matrix
from src.phase_space import Point, diameter
from src.systems import OrbitBudget, SystemSpec

from .schedule import geometric_schedule, interpolation_bound, validate_schedule

logger = logging.getLogger(__name__)


@dataclass
class OscillationReport:
    """Oscillation of one point over [N, M]"""
    N: int
    M: int
    schedule: List[int]
    score: float
    argmax: Tuple[int, int]
    interpolation_bound: float
    mesh_error: float
    threshold: float
    matrix: np.ndarray = field(repr=False)

    @property
    def flagged(self) -> bool:
        return self.score > self.threshold

    @property
    def pairs(self) -> List[Tuple[int, int, float]]:
        """(n, m, W1) for every scheduled pair n < m"""
        rows, cols = np.triu_indices(len(self.schedule), k=1)
        return [(self.schedule[i], self.schedule[j], float(self.matrix[i, j]))
                for i, j in zip(rows, cols)]

    def restricted(self, N: int, M: int) -> float:
        """Score over the scheduled entries inside [N, M]"""
        s = np.asarray(self.schedule)
        keep = (s >= N) & (s <= M)
        if not keep.any():
            raise InputError(f"no schedule entries inside [{N}, {M}]")
        return float(self.matrix[np.ix_(keep, keep)].max())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'N': self.N,
            'M': self.M,
            'schedule_length': len(self.schedule),
            'score': self.score,
            'argmax': list(self.argmax),
            'interpolation_bound': self.interpolation_bound,
            'mesh_error': self.mesh_error,
            'threshold': self.threshold,
            'flagged': self.flagged,
        }


def oscillation_score(spec: SystemSpec, x0: Optional[Point], N: int, M: int,
                      schedule: Optional[Sequence[int]] = None,
                      budget: Optional[OrbitBudget] = None, ratio: float = 1.2,
                      mesh: Optional[float] = None, threshold: float = 0.0) -> OscillationReport:
    """
    Max of W1(e_n(x0), e_m(x0)) over scheduled pairs in [N, M].

    Args:
        spec: System; for the Bowen surrogate horizons are times
        x0: Initial point (u0 for the Bowen surrogate)
        N, M: Horizon window
        schedule: Horizons to evaluate; geometric with the given ratio if omitted
        budget: Orbit budget (passages for the Bowen surrogate)
        mesh: Grid width for one-dimensional spaces, exact solves if None
        threshold: Verdict threshold d

    Raises:
        InputError: N > M or a schedule outside [N, M]
    """
    schedule = list(schedule) if schedule is not None else geometric_schedule(N, M, ratio)
    validate_schedule(schedule, N, M)
    path = empirical_path(spec, x0, schedule, budget)
    matrix = path_w1_matrix(path, path, mesh)
    i, j = np.unravel_index(int(np.argmax(matrix)), matrix.shape)
    score = float(matrix[i, j])
    report = OscillationReport(
        N=N,
        M=M,
        schedule=[int(s) for s in schedule],
        score=score,
        argmax=(int(schedule[min(i, j)]), int(schedule[max(i, j)])),
        interpolation_bound=interpolation_bound(schedule, diameter(spec.space),
                                                continuous_time=path.continuous_time),
        mesh_error=float(mesh) if mesh is not None and spec.space.is_one_dimensional else 0.0,
        threshold=threshold,
        matrix=matrix,
    )
    logger.debug(f"oscillation {spec.label}: score {score:.6g} over {len(schedule)} horizons")
    return report
