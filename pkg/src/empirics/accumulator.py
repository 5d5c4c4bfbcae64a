# empirics/accumulator.py

"""
Empirical measures of single orbits, batch and streaming.
"""

import logging
from collections import Counter
from typing import Any, Hashable, Optional

import numpy as np

from src.core.errors import InputError
from src.phase_space import PhaseSpace, Point, SpaceKind, as_array
from src.systems import BowenSurrogate, OrbitBudget, SystemSpec, orbit_array
from src.transport import EmpiricalMeasure

logger = logging.getLogger(__name__)


def empirical_measure(spec: SystemSpec, x0: Optional[Point], n: int,
                      budget: Optional[OrbitBudget] = None) -> EmpiricalMeasure:
    """
    e_n(x0): uniform weights 1/n on the first n orbit points, coincident points merged.

    Args:
        spec: System (not the Bowen surrogate, see empirics.paths)
        x0: Initial point
        n: Orbit length, n >= 1
        budget: Orbit budget; the minimal valid one for spec when omitted

    Raises:
        InputError: n < 1 or a budget shorter than n
        ConfigurationError: budget precision too small for the family
    """
    if n < 1:
        raise InputError("n must be at least 1")
    if isinstance(spec.family, BowenSurrogate):
        raise InputError("the Bowen surrogate has occupation measures, not orbit measures")
    if budget is None:
        budget = OrbitBudget.for_system(spec, n)
    elif budget.iterations < n:
        raise InputError(f"budget covers {budget.iterations} iterations, {n} requested")
    points = orbit_array(spec, x0, budget)[:n]
    return EmpiricalMeasure.from_orbit(spec.space, points)


class EmpiricalAccumulator:
    """
    Running atom counts of an orbit.

    The methods extend and extend_internal mutate in place and return the
    accumulator for chaining, so one accumulator has one writer. The
    module-level extend leaves its argument untouched. extract at count n is
    bitwise equal to the batch measure of the same n points.
    """

    def __init__(self, space: PhaseSpace):
        self.space = space
        self.count = 0
        self._counts: Counter = Counter()

    def _key(self, value: Any) -> Hashable:
        if self.space.kind == SpaceKind.ANNULUS:
            return (float(value[0]), float(value[1]))
        if self.space.kind == SpaceKind.BINARY_SHIFT:
            return int(value)
        return float(value)

    def copy(self) -> 'EmpiricalAccumulator':
        clone = EmpiricalAccumulator(self.space)
        clone.count = self.count
        clone._counts = self._counts.copy()
        return clone

    def extend(self, point: Point) -> 'EmpiricalAccumulator':
        """Add one public point"""
        return self.extend_internal(as_array(self.space, [point]))

    def extend_internal(self, points: np.ndarray) -> 'EmpiricalAccumulator':
        """Add internal-layout points in order"""
        for value in points:
            self._counts[self._key(value)] += 1
            self.count += 1
        return self

    @property
    def atom_count(self) -> int:
        return len(self._counts)

    def extract(self) -> EmpiricalMeasure:
        if self.count == 0:
            raise InputError("nothing accumulated yet")
        keys = sorted(self._counts)
        counts = np.array([self._counts[k] for k in keys], dtype=float)
        if self.space.kind == SpaceKind.ANNULUS:
            locations = np.array(keys, dtype=float).reshape(-1, 2)
        elif self.space.kind == SpaceKind.BINARY_SHIFT:
            locations = np.array(keys, dtype=np.int64)
        else:
            locations = np.array(keys, dtype=float)
        return EmpiricalMeasure.from_counts(self.space, locations, counts, self.count)


def extend(acc: EmpiricalAccumulator, point: Point) -> EmpiricalAccumulator:
    """A new accumulator holding acc's points followed by point; acc is unchanged"""
    return acc.copy().extend(point)
