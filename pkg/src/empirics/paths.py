# empirics/paths.py

"""
Empirical measures of one orbit along a schedule of horizons.

A SchedulePath stores e_n(x) for every n in the schedule as rows of weights
over the orbit's distinct points, so comparing horizons never rebuilds or
re-sorts a measure. For the Bowen surrogate the horizons are times and the
rows are occupation fractions of B, the transit and A.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from src.core.errors import InputError
from src.phase_space import PhaseSpace, Point, SpaceKind
from src.systems import BowenSurrogate, OrbitBudget, SystemSpec, occupation_masses, orbit_array
from src.systems.bowen import LOCATION_A, LOCATION_B, LOCATION_TRANSIT
from src.transport import EmpiricalMeasure, coarsen, grid_cells, grid_w1_matrix, w1
from src.transport.tree import edge_length

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SchedulePath:
    """Rows of weights over a shared support, one row per schedule entry"""
    space: PhaseSpace
    schedule: np.ndarray
    support: np.ndarray
    masses: np.ndarray
    continuous_time: bool = False

    @property
    def size(self) -> int:
        return len(self.schedule)

    def measure(self, index: int) -> EmpiricalMeasure:
        row = self.masses[index]
        keep = row > 0.0
        n_source = 0 if self.continuous_time else int(self.schedule[index])
        return EmpiricalMeasure(self.space, self.support[keep], row[keep], n_source=n_source)

    def measures(self) -> List[EmpiricalMeasure]:
        return [self.measure(i) for i in range(self.size)]

    def _cells(self, cells: int) -> np.ndarray:
        return np.minimum((np.asarray(self.support, dtype=float) * cells).astype(np.int64), cells - 1)

    def histogram(self, index: int, cells: int) -> np.ndarray:
        """Masses of the grid cells [k/G, (k+1)/G) at one schedule entry"""
        return np.bincount(self._cells(cells), weights=self.masses[index], minlength=cells)

    def histograms(self, cells: int) -> np.ndarray:
        """(S, cells) grid masses for every schedule entry"""
        index = self._cells(cells)
        return np.vstack([np.bincount(index, weights=row, minlength=cells) for row in self.masses])


def _check_schedule(schedule: Sequence[float]) -> np.ndarray:
    arr = np.asarray(schedule)
    if arr.size == 0:
        raise InputError("schedule must be nonempty")
    if np.any(np.diff(arr) <= 0) or arr[0] <= 0:
        raise InputError("schedule must be positive and strictly increasing")
    return arr


def empirical_path(spec: SystemSpec, x0: Optional[Point], schedule: Sequence[int],
                   budget: Optional[OrbitBudget] = None) -> SchedulePath:
    """
    e_n(x0) for every n in schedule from a single orbit.

    For the Bowen surrogate x0 is the initial offset u0, schedule holds
    times, and budget.iterations counts box passages (required).

    Raises:
        InputError: empty or non-increasing schedule, budget shorter than the schedule
    """
    schedule_arr = _check_schedule(schedule)
    if isinstance(spec.family, BowenSurrogate):
        if budget is None:
            raise InputError("the Bowen surrogate needs a budget giving its number of passages")
        masses = occupation_masses(spec.family.params, float(x0), budget.iterations,
                                   schedule_arr.astype(float))
        support = np.array([LOCATION_B, LOCATION_TRANSIT, LOCATION_A])
        return SchedulePath(spec.space, schedule_arr, support, masses, continuous_time=True)

    horizon = int(schedule_arr[-1])
    if budget is None:
        budget = OrbitBudget.for_system(spec, horizon)
    elif budget.iterations < horizon:
        raise InputError(f"budget covers {budget.iterations} iterations, schedule needs {horizon}")

    points = orbit_array(spec, x0, budget)[:horizon]
    axis = 0 if spec.space.kind == SpaceKind.ANNULUS else None
    support, inverse = np.unique(points, axis=axis, return_inverse=True)
    inverse = inverse.ravel()

    counts = np.zeros(len(support))
    masses = np.empty((len(schedule_arr), len(support)))
    start = 0
    for row, n in enumerate(schedule_arr.astype(np.int64)):
        counts += np.bincount(inverse[start:n], minlength=len(support))
        masses[row] = counts / n
        start = n
    logger.debug(f"{spec.label}: path over {len(schedule_arr)} horizons, {len(support)} atoms")
    return SchedulePath(spec.space, schedule_arr, support, masses)


# ---------------------------------------------------------------------------
# W1 between all horizon pairs of two paths


def _cdf_rows(path: SchedulePath, grid: np.ndarray) -> np.ndarray:
    position = np.searchsorted(path.support, grid, side='right') - 1
    cumulative = np.cumsum(path.masses, axis=1)
    gathered = cumulative[:, np.clip(position, 0, None)]
    return np.where(position[None, :] >= 0, gathered, 0.0)


def _one_dimensional_exact(a: SchedulePath, b: SchedulePath) -> np.ndarray:
    grid = np.union1d(np.asarray(a.support, dtype=float), np.asarray(b.support, dtype=float))
    fa = _cdf_rows(a, grid)
    fb = _cdf_rows(b, grid)
    if a.space.kind == SpaceKind.UNIT_INTERVAL:
        lengths = np.append(np.diff(grid), 0.0)
    else:
        lengths = np.append(np.diff(grid), 1.0 - grid[-1] + grid[0])
    out = np.empty((a.size, b.size))
    for i in range(a.size):
        diff = fa[i][None, :] - fb
        if a.space.kind == SpaceKind.UNIT_INTERVAL:
            out[i] = np.abs(diff) @ lengths
            continue
        for j in range(b.size):
            order = np.argsort(diff[j], kind='stable')
            cumulative = np.cumsum(lengths[order])
            pick = min(int(np.searchsorted(cumulative, 0.5 * cumulative[-1])), len(grid) - 1)
            out[i, j] = np.abs(diff[j] - diff[j][order][pick]) @ lengths
    return out


def _shift_exact(a: SchedulePath, b: SchedulePath) -> np.ndarray:
    depth = a.space.depth
    support = np.union1d(a.support, b.support)
    wa = np.zeros((a.size, len(support)))
    wb = np.zeros((b.size, len(support)))
    wa[:, np.searchsorted(support, a.support)] = a.masses
    wb[:, np.searchsorted(support, b.support)] = b.masses
    out = np.zeros((a.size, b.size))
    for level in range(1, depth + 1):
        _, groups = np.unique(np.right_shift(support, depth - level), return_inverse=True)
        groups = groups.ravel()
        width = int(groups.max()) + 1
        ca = np.vstack([np.bincount(groups, weights=row, minlength=width) for row in wa])
        cb = np.vstack([np.bincount(groups, weights=row, minlength=width) for row in wb])
        weight = edge_length(level, depth)
        for i in range(a.size):
            out[i] += weight * np.abs(ca[i][None, :] - cb).sum(axis=1)
    return out


def _annulus(a: SchedulePath, b: SchedulePath, mesh: Optional[float], atom_cap: int) -> np.ndarray:
    ma = a.measures()
    mb = b.measures()
    if mesh is not None:
        ma = [coarsen(m, mesh) for m in ma]
        mb = [coarsen(m, mesh) for m in mb]
    out = np.empty((a.size, b.size))
    for i, mu in enumerate(ma):
        for j, nu in enumerate(mb):
            out[i, j] = w1(mu, nu, atom_cap)
    return out


def path_w1_matrix(a: SchedulePath, b: SchedulePath, mesh: Optional[float] = None,
                   atom_cap: int = 512) -> np.ndarray:
    """
    W1 between e_n of path a and e_m of path b for every schedule pair.

    With mesh on a one-dimensional space both paths are binned onto the mesh
    grid first; each entry is then within mesh of the exact value. Shift
    spaces are always exact. Annulus measures are coarsened to the mesh.

    Returns:
        (a.size, b.size) matrix
    """
    if a.space != b.space:
        raise InputError("paths live on different spaces")
    kind = a.space.kind
    if kind in (SpaceKind.UNIT_INTERVAL, SpaceKind.CIRCLE):
        if mesh is None:
            return _one_dimensional_exact(a, b)
        cells = grid_cells(mesh)
        return grid_w1_matrix(a.histograms(cells), b.histograms(cells), kind)
    if kind == SpaceKind.BINARY_SHIFT:
        return _shift_exact(a, b)
    return _annulus(a, b, mesh, atom_cap)
