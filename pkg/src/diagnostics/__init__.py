# diagnostics/__init__.py

from .schedule import (
    geometric_schedule,
    harmonic_gap,
    interpolation_bound,
    merge_schedules,
    validate_schedule,
)
from .oscillation import OscillationReport, oscillation_score
from .divergence import (
    NON_STATISTICAL,
    NOT_FLAGGED,
    DivergenceCurve,
    DivergenceEstimate,
    DivergenceKind,
    NonStatisticalVerdict,
    delta_e_estimate,
    delta_l1_estimate,
    divergence_curve,
    divergence_table,
    estimate_from_table,
    nonstatistical_flag,
    triangle_terms,
)
from .meta_gap import MetaGapRecord, bifurcation_probe, meta_gap_curve
from .scans import ScanRow, decay_fit, hk_parameter_scan

__all__ = [
    # Schedules
    'geometric_schedule',
    'merge_schedules',
    'validate_schedule',
    'harmonic_gap',
    'interpolation_bound',
    # Per-point oscillation
    'OscillationReport',
    'oscillation_score',
    # Divergence functionals
    'DivergenceKind',
    'DivergenceEstimate',
    'DivergenceCurve',
    'NonStatisticalVerdict',
    'NON_STATISTICAL',
    'NOT_FLAGGED',
    'divergence_table',
    'estimate_from_table',
    'divergence_curve',
    'delta_e_estimate',
    'delta_l1_estimate',
    'nonstatistical_flag',
    'triangle_terms',
    # Meta-level
    'MetaGapRecord',
    'meta_gap_curve',
    'bifurcation_probe',
    # Scans and fits
    'ScanRow',
    'hk_parameter_scan',
    'decay_fit',
]
