# transport/__init__.py

from .measures import EmpiricalMeasure, MetaMeasure, TransportPlan, fmt
from .one_dimensional import (
    circle_w1_with_shift,
    grid_cells,
    grid_histogram,
    grid_w1_matrix,
    grid_w1_pairs,
    w1_circle,
    w1_interval,
)
from .discrete import EntropicBracket, w1_discrete, w1_entropic
from .tree import cylinder_masses, w1_shift
from .lifted import (
    DEFAULT_ATOM_CAP,
    coarsen,
    ground_distance_matrix,
    lifted_solution,
    lifted_w1,
    matched_l1,
    w1,
)

__all__ = [
    # Measures
    'EmpiricalMeasure',
    'MetaMeasure',
    'TransportPlan',
    'fmt',
    # One-dimensional solvers
    'w1_interval',
    'w1_circle',
    'circle_w1_with_shift',
    'grid_cells',
    'grid_histogram',
    'grid_w1_matrix',
    'grid_w1_pairs',
    # Discrete solvers
    'w1_discrete',
    'w1_entropic',
    'EntropicBracket',
    'w1_shift',
    'cylinder_masses',
    # Lifted metric
    'w1',
    'coarsen',
    'ground_distance_matrix',
    'lifted_solution',
    'lifted_w1',
    'matched_l1',
    'DEFAULT_ATOM_CAP',
]
