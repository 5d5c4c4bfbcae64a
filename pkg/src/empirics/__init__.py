# empirics/__init__.py

from .accumulator import EmpiricalAccumulator, empirical_measure, extend
from .paths import SchedulePath, empirical_path, path_w1_matrix
from .meta import (
    arc_uniform_measure,
    arc_uniform_target,
    arcsine_reference,
    boundary_measure,
    dirac_target,
    meta_empirical,
    uniform_measure,
)

__all__ = [
    # Single orbits
    'EmpiricalAccumulator',
    'empirical_measure',
    'extend',
    'SchedulePath',
    'empirical_path',
    'path_w1_matrix',
    # Pushforwards and targets
    'meta_empirical',
    'uniform_measure',
    'arc_uniform_measure',
    'arc_uniform_target',
    'dirac_target',
    'arcsine_reference',
    'boundary_measure',
]
