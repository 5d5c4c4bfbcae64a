# transport/oracles.py

"""
Slow, independent reference computations used to calibrate and test the
production solvers. None of these share code with the solvers they check.
"""

import itertools
import logging
import math
from typing import Any, List, Sequence

import mpmath
import numpy as np

from src.core.errors import InputError

logger = logging.getLogger(__name__)

VERTEX_ENUMERATION_LIMIT = 16


def cdf_integral_w1(x: Sequence[float], wx: Sequence[float],
                    y: Sequence[float], wy: Sequence[float]) -> float:
    """Integral of |F - G| over [0, 1] by walking the merged support in pure Python"""
    events = sorted([(float(p), float(w), 0.0) for p, w in zip(x, wx)]
                    + [(float(p), 0.0, float(w)) for p, w in zip(y, wy)])
    f = g = 0.0
    previous = None
    pieces: List[float] = []
    for position, dw_x, dw_y in events:
        if previous is not None and position > previous:
            pieces.append(abs(f - g) * (position - previous))
        f += dw_x
        g += dw_y
        previous = position
    return math.fsum(pieces)


def vertex_enumeration_w1(cost: Any, a: Any, b: Any, tolerance: float = 1e-12) -> float:
    """
    Exact transport cost by enumerating basic feasible solutions.

    Every vertex of the transport polytope is supported on m + n - 1 cells;
    each candidate support is solved as a square linear system and kept when
    the solution is exact and nonnegative.

    Raises:
        InputError: more than VERTEX_ENUMERATION_LIMIT cells
    """
    cost = np.asarray(cost, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = cost.shape
    if m * n > VERTEX_ENUMERATION_LIMIT:
        raise InputError(f"vertex enumeration is limited to {VERTEX_ENUMERATION_LIMIT} cells")

    # marginal constraints, last column constraint dropped as redundant
    constraints = np.zeros((m + n - 1, m * n))
    for i in range(m):
        constraints[i, i * n:(i + 1) * n] = 1.0
    for j in range(n - 1):
        constraints[m + j, j::n] = 1.0
    rhs = np.concatenate([a, b[:-1]])

    best = math.inf
    for support in itertools.combinations(range(m * n), m + n - 1):
        columns = constraints[:, support]
        if abs(np.linalg.det(columns)) < 1e-12:
            continue
        x = np.linalg.solve(columns, rhs)
        if np.any(x < -tolerance):
            continue
        plan = np.zeros(m * n)
        plan[list(support)] = x
        plan = plan.reshape(m, n)
        if np.abs(plan.sum(axis=0) - b).max() > 1e-9:
            continue
        best = min(best, float(np.sum(plan * cost)))
    return best


def two_by_two_w1(cost: Any, a: Any, b: Any) -> float:
    """
    Minimum over the one-parameter family of 2x2 couplings.

    The coupling is fixed by t = P[0, 0] in [max(0, a0 - b1), min(a0, b0)];
    the objective is linear in t, so the endpoints suffice.
    """
    cost = np.asarray(cost, dtype=float)
    a0, a1 = float(a[0]), float(a[1])
    b0, b1 = float(b[0]), float(b[1])

    def objective(t: float) -> float:
        plan = np.array([[t, a0 - t], [b0 - t, a1 - b0 + t]])
        return float(np.sum(plan * cost))

    return min(objective(max(0.0, a0 - b1)), objective(min(a0, b0)))


def logistic_conjugacy_orbit(x0: float, n: int, digits: int = 40) -> List[float]:
    """
    Orbit of the full logistic map through its conjugacy with angle doubling.

    theta_0 = asin(sqrt(x0)) / pi is taken from the double x0 in mpmath
    precision and x_k = sin^2(2^k pi theta_0); the working precision grows
    with n so every emitted value is correctly rounded.
    """
    with mpmath.workdps(digits + int(n * 0.302) + 1):
        theta = mpmath.asin(mpmath.sqrt(mpmath.mpf(x0))) / mpmath.pi
        return [float(mpmath.sin(mpmath.ldexp(theta, k) * mpmath.pi) ** 2) for k in range(n)]


def circle_uniform_dirac_w1(grid: int) -> float:
    """W1 on the circle between the uniform grid of the given size and a Dirac mass at 0"""
    distances = [min(k / grid, 1.0 - k / grid) for k in range(grid)]
    return math.fsum(distances) / grid
