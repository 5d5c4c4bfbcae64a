# transport/discrete.py

"""
Discrete optimal transport between weight vectors under an explicit cost matrix.

w1_discrete solves the problem exactly with POT's network simplex and
certifies the returned plan. w1_entropic runs log-domain Sinkhorn and turns
its output into a two-sided bracket around the exact value.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
import ot

from src.core.errors import InputError
from src.transport.measures import TransportPlan

logger = logging.getLogger(__name__)

CERTIFY_TOLERANCE = 1e-10
EMD_MAX_ITERATIONS = 10_000_000


def _prepare(cost: Any, a: Any, b: Any) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    cost = np.ascontiguousarray(np.asarray(cost, dtype=np.float64))
    a = np.ascontiguousarray(np.asarray(a, dtype=np.float64).ravel())
    b = np.ascontiguousarray(np.asarray(b, dtype=np.float64).ravel())
    if cost.ndim != 2 or cost.shape != (len(a), len(b)):
        raise InputError(f"cost shape {cost.shape} does not match marginals ({len(a)}, {len(b)})")
    if len(a) == 0 or len(b) == 0:
        raise InputError("marginals must be nonempty")
    if np.any(cost < 0.0):
        raise InputError("cost entries must be nonnegative")
    for name, w in (('mu_weights', a), ('nu_weights', b)):
        if np.any(w < 0.0) or abs(float(w.sum()) - 1.0) > 1e-9:
            raise InputError(f"{name} is not a probability vector")
    return cost, a, b


def w1_discrete(cost: Any, mu_weights: Any, nu_weights: Any,
                tolerance: float = CERTIFY_TOLERANCE) -> Tuple[float, TransportPlan]:
    """
    Exact transport cost and an optimal plan.

    Args:
        cost: (m, n) nonnegative cost matrix
        mu_weights: length-m probability vector
        nu_weights: length-n probability vector
        tolerance: Certification tolerance on marginals and objective

    Returns:
        (value, plan)

    Raises:
        InputError: dimension mismatch or invalid weights
        InvariantViolation: the solver output fails certification
    """
    cost, a, b = _prepare(cost, mu_weights, nu_weights)
    if len(a) == 1 or len(b) == 1:
        # the only coupling is the product measure
        coupling = np.outer(a, b)
        info: Dict[str, Any] = {'solver': 'product'}
    else:
        coupling, log = ot.emd(a, b, cost, numItermax=EMD_MAX_ITERATIONS, log=True)
        info = {'solver': 'network_simplex', 'result_code': int(log['result_code'])}
        if log.get('warning'):
            logger.warning(f"network simplex: {log['warning']}")
            info['warning'] = log['warning']
    value = float(np.sum(coupling * cost))
    plan = TransportPlan(row_marginal=a, column_marginal=b, coupling=coupling,
                         objective=value, details=info)
    plan.certify(cost, tolerance)
    logger.debug(f"w1_discrete {cost.shape}: {value:.6g}")
    return value, plan


@dataclass
class EntropicBracket:
    """Certified interval [lower, upper] around an exact transport cost"""
    lower: float
    upper: float
    converged: bool
    iterations: int
    epsilon: float

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def as_tuple(self) -> Tuple[float, float]:
        return self.lower, self.upper

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lower': self.lower,
            'upper': self.upper,
            'width': self.width,
            'converged': self.converged,
            'iterations': self.iterations,
            'epsilon': self.epsilon,
        }


def round_to_feasible(plan: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Project an approximate plan onto the couplings of (a, b).

    Rows and then columns are scaled down to their marginals, and the
    remaining mass is distributed as the product of the row and column
    deficits, so the result is feasible and nonnegative.
    """
    rows = plan.sum(axis=1)
    x = np.minimum(np.divide(a, rows, out=np.ones_like(a), where=rows > 0), 1.0)
    scaled = plan * x[:, None]
    cols = scaled.sum(axis=0)
    y = np.minimum(np.divide(b, cols, out=np.ones_like(b), where=cols > 0), 1.0)
    scaled = scaled * y[None, :]
    deficit_rows = np.maximum(a - scaled.sum(axis=1), 0.0)
    deficit_cols = np.maximum(b - scaled.sum(axis=0), 0.0)
    mass = deficit_rows.sum()
    if mass > 0.0:
        scaled = scaled + np.outer(deficit_rows, deficit_cols) / mass
    return scaled


def dual_lower_bound(cost: np.ndarray, a: np.ndarray, b: np.ndarray, f: np.ndarray) -> float:
    """
    Dual objective of a feasible pair built from the row potential f.

    g is the c-transform of f, then f is replaced by the c-transform of g;
    the pair satisfies f_i + g_j <= C_ij, so the objective bounds W1 from below.
    """
    g = np.min(cost - f[:, None], axis=0)
    f = np.min(cost - g[None, :], axis=1)
    return float(np.dot(a, f) + np.dot(b, g))


def w1_entropic(cost: Any, mu_weights: Any, nu_weights: Any, epsilon: float,
                max_iters: int = 10_000, stop_threshold: float = 1e-9) -> EntropicBracket:
    """
    Bracket the exact transport cost with log-domain Sinkhorn.

    The lower bound comes from the dual potentials made feasible by
    c-transforms, the upper bound from the cost of the Sinkhorn plan rounded
    onto the coupling polytope. Both are valid whether or not Sinkhorn
    converged; non-convergence only sets converged=False.

    Raises:
        InputError: epsilon <= 0, or invalid inputs
    """
    if epsilon <= 0.0:
        raise InputError("epsilon must be positive")
    if max_iters < 1:
        raise InputError("max_iters must be at least 1")
    cost, a, b = _prepare(cost, mu_weights, nu_weights)

    with warnings.catch_warnings():
        # non-convergence is reported through the bracket instead
        warnings.simplefilter('ignore')
        plan, log = ot.sinkhorn(a, b, cost, epsilon, method='sinkhorn_log',
                                numItermax=max_iters, stopThr=stop_threshold, log=True)

    errors = log.get('err', [])
    final_error = float(errors[-1]) if len(errors) else float('inf')
    iterations = int(log.get('niter', max_iters))
    converged = final_error <= stop_threshold

    f = epsilon * np.asarray(log['log_u'], dtype=float)
    if not np.all(np.isfinite(f)):
        f = np.zeros_like(a)
    lower = max(0.0, dual_lower_bound(cost, a, b, f))
    rounded = round_to_feasible(np.nan_to_num(np.asarray(plan, dtype=float)), a, b)
    upper = float(np.sum(rounded * cost))
    lower = min(lower, upper)

    if not converged:
        logger.warning(
            f"Sinkhorn did not converge in {max_iters} iterations "
            f"(marginal error {final_error:.3g}); bracket width {upper - lower:.3g}"
        )
    return EntropicBracket(lower=lower, upper=upper, converged=converged,
                           iterations=iterations, epsilon=epsilon)
