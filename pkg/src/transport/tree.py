# transport/tree.py

"""
Tree optimal transport on the truncated binary shift.

Words of length D are the leaves of the binary cylinder tree. The edge into
a node at depth k has length 2^-(k+1) for 1 <= k < D and 2^-D at the leaves,
so the path length between two words first differing at index j is exactly
2^-j, the shift metric. W1 under a tree metric is the sum over edges of
edge length times the absolute mass difference of the subtree below it.
"""

import logging

import numpy as np

from src.core.errors import InputError
from src.phase_space import SpaceKind
from src.transport.measures import EmpiricalMeasure

logger = logging.getLogger(__name__)


def edge_length(level: int, depth: int) -> float:
    """Length of the edge entering a cylinder node at the given level (1..depth)"""
    if not 1 <= level <= depth:
        raise InputError(f"level {level} outside 1..{depth}")
    return 2.0 ** -depth if level == depth else 2.0 ** -(level + 1)


def cylinder_masses(measure: EmpiricalMeasure, level: int) -> np.ndarray:
    """Mass of every length-``level`` cylinder, indexed by prefix code"""
    depth = measure.space.depth
    prefixes = np.right_shift(measure.locations, depth - level)
    return np.bincount(prefixes, weights=measure.weights, minlength=1 << level)


def w1_shift(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> float:
    """
    Exact W1 between two measures on one BinaryShift space.

    Raises:
        InputError: non-shift spaces or differing truncation depths
    """
    for m in (mu, nu):
        if m.space.kind != SpaceKind.BINARY_SHIFT:
            raise InputError(f"w1_shift needs binary_shift measures, got {m.space.kind.value}")
    if mu.space.depth != nu.space.depth:
        raise InputError(f"shift depths differ: {mu.space.depth} vs {nu.space.depth}")
    depth = mu.space.depth

    codes = np.concatenate([mu.locations, nu.locations])
    signed = np.concatenate([mu.weights, -nu.weights])
    total = 0.0
    for level in range(1, depth + 1):
        prefixes = np.right_shift(codes, depth - level)
        _, inverse = np.unique(prefixes, return_inverse=True)
        difference = np.bincount(inverse.ravel(), weights=signed)
        total += edge_length(level, depth) * float(np.abs(difference).sum())
    return total
