# systems/__init__.py

from .bowen import (
    BowenParams,
    BowenRecord,
    Saddle,
    saddle_passage,
    bowen_running_averages,
    bowen_segments,
    occupation_masses,
    total_time,
)
from .diffeo import DiffeoSpec, FiberAxis, FiberWarp, RadialShear, lift_diffeo, roundtrip_error
from .families import (
    AnosovKatok,
    BowenSurrogate,
    ExpandingTimes,
    Logistic,
    OrbitBudget,
    QuadraticInterval,
    Rotation,
    ShiftOnBlocks,
    SystemSpec,
    required_precision_bits,
    slope_bound,
)
from .orbits import orbit, orbit_array, step
from .anosov_katok import (
    SublemmaReport,
    ak_map,
    band_occupancy,
    boundary_points,
    build_bump_diffeo,
    commutation_residual,
    covering_residual,
    rational_residual,
    verify_sublemma,
)

__all__ = [
    # Bowen surrogate
    'BowenParams',
    'BowenRecord',
    'Saddle',
    'saddle_passage',
    'bowen_running_averages',
    'bowen_segments',
    'occupation_masses',
    'total_time',

    # Annulus maps
    'DiffeoSpec',
    'FiberAxis',
    'FiberWarp',
    'RadialShear',
    'lift_diffeo',
    'roundtrip_error',
    'SublemmaReport',
    'ak_map',
    'band_occupancy',
    'boundary_points',
    'build_bump_diffeo',
    'commutation_residual',
    'covering_residual',
    'rational_residual',
    'verify_sublemma',

    # Families and orbits
    'AnosovKatok',
    'BowenSurrogate',
    'ExpandingTimes',
    'Logistic',
    'OrbitBudget',
    'QuadraticInterval',
    'Rotation',
    'ShiftOnBlocks',
    'SystemSpec',
    'required_precision_bits',
    'slope_bound',
    'orbit',
    'orbit_array',
    'step',
]
