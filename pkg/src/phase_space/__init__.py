# phase_space/__init__.py

from .spaces import (
    Point,
    SpaceKind,
    PhaseSpace,
    as_array,
    as_point,
    to_points,
    canonicalize,
    encode_word,
    decode_word,
    distance,
    diameter,
    pairwise_distance,
    elementwise_distance,
    arc_distance,
    sample_reference,
    sample_reference_array,
)

__all__ = [
    'Point',
    'SpaceKind',
    'PhaseSpace',
    'as_array',
    'as_point',
    'to_points',
    'canonicalize',
    'encode_word',
    'decode_word',
    'distance',
    'diameter',
    'pairwise_distance',
    'elementwise_distance',
    'arc_distance',
    'sample_reference',
    'sample_reference_array',
]
