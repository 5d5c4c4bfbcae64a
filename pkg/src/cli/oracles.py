# cli/oracles.py

"""
Registered brute-force oracles for ``ergolab oracle <name>``.

Each oracle computes reference values independently of the production path
(or next to it, for comparison) with fixed seeds, so its printout can be used
to calibrate test tolerances.
"""

import logging
import math
from typing import Any, Dict

import numpy as np

from src.core.registry import ExperimentRegistry
from src.phase_space import PhaseSpace
from src.systems import BowenParams, bowen_running_averages
from src.systems.symbolic import block_end_frequencies
from src.transport import EmpiricalMeasure, w1_circle, w1_discrete, w1_entropic, w1_interval
from src.transport.oracles import (
    cdf_integral_w1,
    circle_uniform_dirac_w1,
    logistic_conjugacy_orbit,
    vertex_enumeration_w1,
)

logger = logging.getLogger(__name__)

ORACLES = ExperimentRegistry("oracle")

ORACLE_SEED = 20240607


@ORACLES.decorator("gaunersdorfer", description="Bowen limsup/liminf closed forms vs simulation")
def gaunersdorfer() -> Dict[str, Any]:
    params = BowenParams(alpha_plus=1.0, alpha_minus=2.0, beta_plus=1.0, beta_minus=2.0)
    records = bowen_running_averages(params, 0.1, 60)
    window = [r.average for r in records[29:60]]
    return {
        'lam': params.lam,
        'sigma': params.sigma,
        'upper_closed_form': params.upper_average,
        'lower_closed_form': params.lower_average,
        'simulated_sup_30_60': max(window),
        'simulated_inf_30_60': min(window),
    }


@ORACLES.decorator("block_frequencies", description="Symbol-1 frequency at block ends, blocks 10^i")
def block_frequencies() -> Dict[str, Any]:
    blocks = [10 ** i for i in range(1, 7)]
    return {f"end_of_block_{i + 1}": f for i, f in enumerate(block_end_frequencies(blocks))}


@ORACLES.decorator("lp_vertex_enumeration", description="Network simplex vs vertex enumeration")
def lp_vertex_enumeration() -> Dict[str, Any]:
    rng = np.random.default_rng(ORACLE_SEED)
    worst = 0.0
    for _ in range(50):
        m, n = rng.integers(1, 5, size=2)
        cost = rng.random((m, n))
        a = rng.random(m) + 0.1
        b = rng.random(n) + 0.1
        a, b = a / a.sum(), b / b.sum()
        value, _ = w1_discrete(cost, a, b)
        worst = max(worst, abs(value - vertex_enumeration_w1(cost, a, b)))
    return {'instances': 50, 'max_abs_difference': worst}


@ORACLES.decorator("cdf_integral", description="w1_interval vs pure-Python CDF integral")
def cdf_integral() -> Dict[str, Any]:
    rng = np.random.default_rng(ORACLE_SEED)
    space = PhaseSpace.unit_interval()
    worst = 0.0
    for _ in range(100):
        x, y = rng.random(rng.integers(1, 30)), rng.random(rng.integers(1, 30))
        wx, wy = rng.random(len(x)) + 0.01, rng.random(len(y)) + 0.01
        wx, wy = wx / wx.sum(), wy / wy.sum()
        mu = EmpiricalMeasure.from_atoms(space, x.tolist(), wx.tolist())
        nu = EmpiricalMeasure.from_atoms(space, y.tolist(), wy.tolist())
        worst = max(worst, abs(w1_interval(mu, nu) - cdf_integral_w1(x, wx, y, wy)))
    return {'instances': 100, 'max_abs_difference': worst}


@ORACLES.decorator("logistic_conjugacy", description="lam = 4 orbit via theta -> 2 theta in mpmath")
def logistic_conjugacy() -> Dict[str, Any]:
    x0 = math.sin(math.pi / 7.0) ** 2
    orbit = logistic_conjugacy_orbit(x0, 41)
    return {'x0': x0, 'x_10': orbit[10], 'x_20': orbit[20], 'x_40': orbit[40]}


@ORACLES.decorator("circle_uniform_dirac", description="Uniform grid on the circle vs a Dirac mass")
def circle_uniform_dirac() -> Dict[str, Any]:
    space = PhaseSpace.circle()
    grid = 2048
    uniform = EmpiricalMeasure.from_atoms(space, (np.arange(grid) / grid).tolist(),
                                          [1.0 / grid] * grid)
    return {
        'grid': grid,
        'closed_form': circle_uniform_dirac_w1(grid),
        'w1_circle': w1_circle(uniform, EmpiricalMeasure.dirac(space, 0.0)),
        'limit': 0.25,
    }


@ORACLES.decorator("entropic_bracket", description="Entropic lower/upper bounds vs the exact value")
def entropic_bracket() -> Dict[str, Any]:
    rng = np.random.default_rng(ORACLE_SEED)
    contained = 0
    widest = 0.0
    for _ in range(20):
        cost = rng.random((6, 7))
        a, b = rng.random(6) + 0.1, rng.random(7) + 0.1
        a, b = a / a.sum(), b / b.sum()
        exact, _ = w1_discrete(cost, a, b)
        bracket = w1_entropic(cost, a, b, epsilon=1e-2)
        contained += int(bracket.lower - 1e-9 <= exact <= bracket.upper + 1e-9)
        widest = max(widest, bracket.width)
    return {'instances': 20, 'contained': contained, 'widest_bracket': widest}
