# empirics/meta.py

"""
Monte-Carlo pushforwards e_n(f)_* mu and the targets they are compared with.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from src.core.errors import InputError
from src.core.worker_pool import ordered_map
from src.phase_space import PhaseSpace, Point, SpaceKind, as_array, canonicalize
from src.systems import OrbitBudget, SystemSpec
from src.systems.anosov_katok import boundary_points
from src.transport import EmpiricalMeasure, MetaMeasure

from .accumulator import empirical_measure

logger = logging.getLogger(__name__)


def _measure_task(task: Tuple[SystemSpec, Optional[Point], int, Optional[OrbitBudget]]) -> EmpiricalMeasure:
    spec, x0, n, budget = task
    return empirical_measure(spec, x0, n, budget)


def meta_empirical(spec: SystemSpec, sample: Sequence[Optional[Point]], n: int,
                   budget: Optional[OrbitBudget] = None, workers: int = 1) -> MetaMeasure:
    """
    Uniform meta-measure over e_n(x) for x in sample.

    Atoms keep the sample order, whatever the worker count.

    Raises:
        InputError: empty sample
    """
    if len(sample) == 0:
        raise InputError("sample must be nonempty")
    tasks = [(spec, x, n, budget) for x in sample]
    atoms = ordered_map(_measure_task, tasks, workers)
    logger.debug(f"meta_empirical {spec.label}: n={n}, {len(atoms)} atoms")
    return MetaMeasure.uniform(atoms)


# ---------------------------------------------------------------------------
# Reference and target measures


def uniform_measure(space: PhaseSpace, resolution: int) -> EmpiricalMeasure:
    """
    Equal-weight grid approximating the reference measure.

    Circle atoms sit at k/resolution, interval atoms at cell midpoints.
    """
    if resolution < 1:
        raise InputError("resolution must be at least 1")
    k = np.arange(resolution)
    if space.kind == SpaceKind.CIRCLE:
        locations = k / resolution
    elif space.kind == SpaceKind.UNIT_INTERVAL:
        locations = (k + 0.5) / resolution
    else:
        raise InputError(f"uniform grids are provided for one-dimensional spaces, not {space.kind.value}")
    return EmpiricalMeasure(space, locations, np.full(resolution, 1.0 / resolution))


def arc_uniform_measure(x: float, s: float, resolution: int) -> EmpiricalMeasure:
    """
    Grid approximation of normalized Lebesgue on the arc [x, x + s).

    s = 0 gives the Dirac mass at x; s >= 1 gives the uniform circle grid.
    """
    circle = PhaseSpace.circle()
    if s < 0.0:
        raise InputError("arc length must be nonnegative")
    if s == 0.0:
        return EmpiricalMeasure.dirac(circle, x)
    if s >= 1.0:
        return uniform_measure(circle, resolution)
    points = canonicalize(circle, float(x) + s * (np.arange(resolution) + 0.5) / resolution)
    return EmpiricalMeasure.from_atoms(circle, points, np.full(resolution, 1.0 / resolution),
                                       internal=True)


def arc_uniform_target(sample: Sequence[float], s: float, resolution: int = 2048) -> MetaMeasure:
    """Sample average of the Dirac masses at Leb[x, x + s)"""
    if len(sample) == 0:
        raise InputError("sample must be nonempty")
    start = as_array(PhaseSpace.circle(), list(sample))
    return MetaMeasure.uniform([arc_uniform_measure(float(x), s, resolution) for x in start])


def dirac_target(measure: EmpiricalMeasure) -> MetaMeasure:
    """The Dirac mass at one measure"""
    return MetaMeasure.dirac(measure)


def arcsine_reference(resolution: int) -> EmpiricalMeasure:
    """
    Quantile grid of the arcsine law, the absolutely continuous invariant
    measure of the full logistic map. Atoms sit at F^-1((k + 1/2) / resolution)
    with F(x) = (2/pi) asin(sqrt(x)).
    """
    if resolution < 1:
        raise InputError("resolution must be at least 1")
    u = (np.arange(resolution) + 0.5) / resolution
    locations = np.sin(0.5 * np.pi * u) ** 2
    return EmpiricalMeasure(PhaseSpace.unit_interval(), locations,
                            np.full(resolution, 1.0 / resolution))


def boundary_measure(spec: SystemSpec, resolution: int) -> EmpiricalMeasure:
    """Pushforward by h o g of the uniform grid on the boundary circle {0} x S^1"""
    points = boundary_points(spec, resolution)
    return EmpiricalMeasure.from_atoms(spec.space, canonicalize(spec.space, points),
                                       np.full(resolution, 1.0 / resolution), internal=True)

