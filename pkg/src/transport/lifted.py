# transport/lifted.py

"""
W1 dispatch by space, support coarsening, and the lifted metric on
measures of measures.

lifted_w1 is a discrete problem whose ground cost is the matrix of W1
distances between atom measures. Filling that matrix dominates the cost, so
it can be passed back in, and for one-dimensional spaces it can be evaluated
in a single batch on a common grid.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from src.core.errors import InputError, ResourceError
from src.core.worker_pool import ordered_map
from src.phase_space import SpaceKind, elementwise_distance, pairwise_distance
from src.transport.discrete import w1_discrete
from src.transport.measures import EmpiricalMeasure, MetaMeasure, TransportPlan
from src.transport.one_dimensional import grid_cells, grid_w1_pairs, w1_circle, w1_interval
from src.transport.tree import w1_shift

logger = logging.getLogger(__name__)

DEFAULT_ATOM_CAP = 512
# pairwise gap checks in coarsen are skipped above this many annulus atoms
_PAIRWISE_GAP_LIMIT = 4096


def w1(mu: EmpiricalMeasure, nu: EmpiricalMeasure, atom_cap: int = DEFAULT_ATOM_CAP) -> float:
    """
    W1 between two measures on the same space, using the exact solver for
    its kind. Annulus measures go through the network simplex.

    Raises:
        InputError: measures on different spaces
        ResourceError: annulus supports above atom_cap
    """
    if mu.space != nu.space:
        raise InputError(f"measures live on different spaces: {mu.space} vs {nu.space}")
    kind = mu.space.kind
    if kind == SpaceKind.UNIT_INTERVAL:
        return w1_interval(mu, nu)
    if kind == SpaceKind.CIRCLE:
        return w1_circle(mu, nu)
    if kind == SpaceKind.BINARY_SHIFT:
        return w1_shift(mu, nu)
    if max(mu.size, nu.size) > atom_cap:
        raise ResourceError(
            f"annulus measures with {mu.size} and {nu.size} atoms exceed the cap of "
            f"{atom_cap}; coarsen them first"
        )
    cost = pairwise_distance(mu.space, mu.locations, nu.locations)
    return w1_discrete(cost, mu.weights, nu.weights)[0]


# ---------------------------------------------------------------------------
# Coarsening


def _min_gap(mu: EmpiricalMeasure) -> float:
    kind = mu.space.kind
    locs = mu.locations
    if kind == SpaceKind.UNIT_INTERVAL:
        return float(np.diff(locs).min())
    if kind == SpaceKind.CIRCLE:
        gaps = np.append(np.diff(locs), 1.0 - locs[-1] + locs[0])
        return float(gaps.min())
    if kind == SpaceKind.BINARY_SHIFT:
        # in an ultrametric the closest pair is adjacent in lexicographic order
        return float(elementwise_distance(mu.space, locs[:-1], locs[1:]).min())
    if mu.size > _PAIRWISE_GAP_LIMIT:
        return 0.0
    d = pairwise_distance(mu.space, locs, locs)
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def _snap(values: np.ndarray, cells: int) -> np.ndarray:
    index = np.minimum(np.floor(values * cells), cells - 1)
    return (index + 0.5) / cells


def coarsen(mu: EmpiricalMeasure, mesh: float) -> EmpiricalMeasure:
    """
    Snap atoms to a grid of width at most mesh and merge them.

    Interval, circle and annulus coordinates move to cell centres of a grid of
    ceil(1/mesh) cells; shift words keep their first ceil(log2(1/mesh))
    symbols and zero the rest. Either way each atom moves at most mesh, so
    W1(mu, coarsen(mu, mesh)) <= mesh. A measure whose atoms are already
    more than mesh apart is returned unchanged.

    Raises:
        InputError: mesh <= 0
    """
    if mesh <= 0.0:
        raise InputError("mesh must be positive")
    if mu.size == 1 or _min_gap(mu) > mesh:
        return mu

    space = mu.space
    if space.kind == SpaceKind.BINARY_SHIFT:
        keep = int(np.ceil(np.log2(1.0 / mesh))) if mesh < 1.0 else 0
        if keep >= space.depth:
            return mu
        drop = space.depth - keep
        snapped = np.left_shift(np.right_shift(mu.locations, drop), drop)
    else:
        snapped = _snap(np.asarray(mu.locations, dtype=float), grid_cells(mesh))

    coarse = EmpiricalMeasure.from_atoms(space, snapped, mu.weights, n_source=mu.n_source,
                                         internal=True)
    logger.debug(f"coarsen: {mu.size} -> {coarse.size} atoms at mesh {mesh:.3g}")
    return coarse


# ---------------------------------------------------------------------------
# Lifted metric


def _ground_row(task: Tuple[EmpiricalMeasure, Sequence[EmpiricalMeasure], int]) -> np.ndarray:
    mu, others, atom_cap = task
    return np.array([w1(mu, nu, atom_cap) for nu in others])


def ground_distance_matrix(M: MetaMeasure, N: MetaMeasure, mesh: Optional[float] = None,
                           workers: int = 1, atom_cap: int = DEFAULT_ATOM_CAP) -> np.ndarray:
    """
    Pairwise W1 between the atoms of M and N.

    Args:
        M, N: Meta-measures on one space
        mesh: When given and the space is one-dimensional, evaluate all pairs
            exactly on the mesh grid (each entry off by at most mesh)
        workers: Worker processes for the exact row-by-row fill
        atom_cap: Forwarded to annulus solves

    Returns:
        (M.size, N.size) matrix
    """
    if M.space != N.space:
        raise InputError("meta-measures live on different spaces")
    if mesh is not None and M.space.is_one_dimensional:
        return grid_w1_pairs(M.atoms, N.atoms, mesh)
    rows = ordered_map(_ground_row, [(mu, N.atoms, atom_cap) for mu in M.atoms], workers)
    return np.vstack(rows)


def lifted_solution(M: MetaMeasure, N: MetaMeasure, ground: Optional[np.ndarray] = None,
                    atom_cap: int = DEFAULT_ATOM_CAP, mesh: Optional[float] = None,
                    workers: int = 1) -> Tuple[float, TransportPlan, np.ndarray]:
    """
    Lifted W1 with its outer plan and the ground matrix used.

    Raises:
        ResourceError: either side has more than atom_cap atoms
        InputError: ground has the wrong shape
    """
    if M.size > atom_cap or N.size > atom_cap:
        raise ResourceError(
            f"lifted_w1 on {M.size} x {N.size} atoms exceeds the cap of {atom_cap} per side; "
            f"coarsen the atom measures or reduce the sample"
        )
    if ground is None:
        ground = ground_distance_matrix(M, N, mesh=mesh, workers=workers, atom_cap=atom_cap)
    elif ground.shape != (M.size, N.size):
        raise InputError(f"ground matrix shape {ground.shape} does not match ({M.size}, {N.size})")
    value, plan = w1_discrete(ground, M.weights, N.weights)
    return value, plan, ground


def lifted_w1(M: MetaMeasure, N: MetaMeasure, ground: Optional[np.ndarray] = None,
              atom_cap: int = DEFAULT_ATOM_CAP, mesh: Optional[float] = None,
              workers: int = 1) -> float:
    """Wasserstein distance between meta-measures with W1 as ground cost"""
    return lifted_solution(M, N, ground, atom_cap, mesh, workers)[0]


def matched_l1(Ms: Sequence[EmpiricalMeasure], Ns: Sequence[EmpiricalMeasure],
               atom_cap: int = DEFAULT_ATOM_CAP) -> float:
    """
    Sample average of W1 between index-matched measures.

    This is the cost of the diagonal coupling between the two uniform
    meta-measures, hence an upper bound on their lifted distance.
    """
    if len(Ms) != len(Ns) or not Ms:
        raise InputError("matched samples must be nonempty and of equal length")
    return float(np.mean([w1(mu, nu, atom_cap) for mu, nu in zip(Ms, Ns)]))
