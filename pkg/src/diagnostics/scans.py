# diagnostics/scans.py

"""
Logistic parameter scan and power-law fits of decaying series.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import InputError
from src.phase_space import Point
from src.systems import OrbitBudget, SystemSpec

from .divergence import divergence_table
from .schedule import geometric_schedule

logger = logging.getLogger(__name__)

SCAN_QUANTILES = (0.5, 0.9)


@dataclass
class ScanRow:
    """Oscillation summary of one logistic parameter"""
    lam: float
    delta_e: float
    q50: float
    q90: float
    max_score: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def hk_parameter_scan(lambda_grid: Sequence[float], N: int, M: int, sample: Sequence[Point],
                      budget: Optional[OrbitBudget] = None, ratio: float = 1.2,
                      mesh: Optional[float] = None, workers: int = 1) -> List[ScanRow]:
    """
    delta_e_N(f_lam, f_lam) and per-point oscillation quantiles for every lam.

    Finite-horizon diagnostic only: a large value suggests oscillation up to
    M and certifies nothing about the limit.

    Raises:
        InputError: lam outside [0, 4]
    """
    if any(not 0.0 <= lam <= 4.0 for lam in lambda_grid):
        raise InputError("every lam must lie in the range [0,4]")
    schedule = geometric_schedule(N, M, ratio)
    rows = []
    for lam in lambda_grid:
        spec = SystemSpec.logistic(lam)
        table = divergence_table(spec, spec, sample, schedule, budget, mesh, workers)
        scores = table.max(axis=(1, 2))
        q50, q90 = np.quantile(scores, SCAN_QUANTILES)
        rows.append(ScanRow(lam=float(lam), delta_e=float(scores.mean()), q50=float(q50),
                            q90=float(q90), max_score=float(scores.max())))
        logger.debug(f"scan lam={lam:.6g}: delta_e {rows[-1].delta_e:.4g}")
    return rows


def decay_fit(series: Sequence[Tuple[float, float]]) -> Tuple[float, float]:
    """
    Least-squares fit of value = C * n^exponent in log-log coordinates.

    Returns:
        (C, exponent)

    Raises:
        InputError: fewer than 3 points, or a nonpositive n or value
    """
    if len(series) < 3:
        raise InputError("decay_fit needs at least 3 points")
    n = np.array([p[0] for p in series], dtype=float)
    values = np.array([p[1] for p in series], dtype=float)
    if np.any(values <= 0.0) or np.any(n <= 0.0):
        raise InputError("decay_fit needs positive n and positive values")
    exponent, intercept = np.polyfit(np.log(n), np.log(values), 1)
    return float(np.exp(intercept)), float(exponent)
