# phase_space/spaces.py

"""
Compact metric phase spaces, their reference measures and metrics.

Four kinds are supported:

- unit_interval: [0, 1] with |x - y|
- circle: R/Z with arc length, angles stored in [0, 1)
- annulus: [0, 1] x R/Z with max(|r - r'|, arc(theta, theta'))
- binary_shift: one-sided {0,1}^N truncated at ``depth`` symbols, with
  d(w, w') = 2^-k where k is the first differing index (0-based)

Points cross the public API as floats, (r, theta) tuples or '0'/'1' words.
Internally orbits are held as numpy arrays: shape (n,) floats for the
one-dimensional spaces, (n, 2) for the annulus and (n,) int64 codes for the
shift, where the first symbol of a word is the most significant bit.
"""

import logging
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.errors import InputError

logger = logging.getLogger(__name__)

Point = Union[float, Tuple[float, float], str]

DEFAULT_SHIFT_DEPTH = 20


class SpaceKind(str, Enum):
    """Kinds of phase space"""
    UNIT_INTERVAL = "unit_interval"
    CIRCLE = "circle"
    ANNULUS = "annulus"
    BINARY_SHIFT = "binary_shift"


class PhaseSpace(BaseModel):
    """A compact metric space with its reference probability measure"""
    model_config = ConfigDict(frozen=True)

    kind: SpaceKind
    depth: Optional[int] = Field(default=None, ge=1, le=52)

    @model_validator(mode='before')
    @classmethod
    def _default_depth(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get('depth') is None:
            if data.get('kind') in (SpaceKind.BINARY_SHIFT, SpaceKind.BINARY_SHIFT.value):
                data = {**data, 'depth': DEFAULT_SHIFT_DEPTH}
        return data

    @model_validator(mode='after')
    def _check_depth(self) -> 'PhaseSpace':
        if self.kind != SpaceKind.BINARY_SHIFT and self.depth is not None:
            raise ValueError("depth applies to binary_shift spaces only")
        return self

    @classmethod
    def unit_interval(cls) -> 'PhaseSpace':
        return cls(kind=SpaceKind.UNIT_INTERVAL)

    @classmethod
    def circle(cls) -> 'PhaseSpace':
        return cls(kind=SpaceKind.CIRCLE)

    @classmethod
    def annulus(cls) -> 'PhaseSpace':
        return cls(kind=SpaceKind.ANNULUS)

    @classmethod
    def binary_shift(cls, depth: int = DEFAULT_SHIFT_DEPTH) -> 'PhaseSpace':
        return cls(kind=SpaceKind.BINARY_SHIFT, depth=depth)

    @property
    def is_one_dimensional(self) -> bool:
        return self.kind in (SpaceKind.UNIT_INTERVAL, SpaceKind.CIRCLE)

    def to_descriptor(self) -> Dict[str, Any]:
        """JSON descriptor, e.g. {"kind": "circle"}"""
        return self.model_dump(mode='json', exclude_none=True)

    @classmethod
    def from_descriptor(cls, descriptor: Dict[str, Any]) -> 'PhaseSpace':
        return cls.model_validate(descriptor)


# ---------------------------------------------------------------------------
# Point encoding


def _wrap(x: np.ndarray) -> np.ndarray:
    """Reduce angles into [0, 1); x % 1.0 can round up to 1.0 for tiny negatives"""
    y = np.mod(x, 1.0)
    return np.where(y >= 1.0, 0.0, y)


def encode_word(space: PhaseSpace, word: Any) -> int:
    """Convert a '0'/'1' word (or a sequence of bits) to its integer code"""
    if isinstance(word, str):
        text = word
    elif isinstance(word, (list, tuple, np.ndarray)):
        text = ''.join(str(int(b)) for b in word)
    else:
        raise InputError(f"binary_shift point must be a word, got {type(word).__name__}")
    if len(text) != space.depth or set(text) - {'0', '1'}:
        raise InputError(f"binary_shift point must be a 0/1 word of length {space.depth}")
    return int(text, 2)


def decode_word(space: PhaseSpace, code: int) -> str:
    return format(int(code), f'0{space.depth}b')


def as_array(space: PhaseSpace, points: Sequence[Point]) -> np.ndarray:
    """
    Validate and encode points into the internal array layout.

    Args:
        space: Target space
        points: Public points

    Returns:
        Canonicalized array (see module docstring for layouts)
    """
    if space.kind == SpaceKind.BINARY_SHIFT:
        return np.array([encode_word(space, p) for p in points], dtype=np.int64)

    if space.kind == SpaceKind.ANNULUS:
        try:
            arr = np.array([(float(p[0]), float(p[1])) for p in points], dtype=float)  # type: ignore[index]
        except (TypeError, IndexError, ValueError) as e:
            raise InputError(f"annulus points must be (radius, angle) pairs: {e}") from e
        arr = arr.reshape(-1, 2)
        if not np.all(np.isfinite(arr)):
            raise InputError("annulus coordinates must be finite")
        if np.any((arr[:, 0] < 0.0) | (arr[:, 0] > 1.0)):
            raise InputError("annulus radius must lie in [0, 1]")
        arr[:, 1] = _wrap(arr[:, 1])
        return arr

    try:
        arr = np.array([float(p) for p in points], dtype=float)  # type: ignore[arg-type]
    except (TypeError, ValueError) as e:
        raise InputError(f"{space.kind.value} points must be real numbers: {e}") from e
    if not np.all(np.isfinite(arr)):
        raise InputError("coordinates must be finite")
    if space.kind == SpaceKind.UNIT_INTERVAL:
        if np.any((arr < 0.0) | (arr > 1.0)):
            raise InputError("unit_interval points must lie in [0, 1]")
        return arr
    return _wrap(arr)


def as_point(space: PhaseSpace, point: Point) -> Any:
    """Validate a single point and return its internal (array-row) form"""
    return as_array(space, [point])[0]


def to_points(space: PhaseSpace, arr: np.ndarray) -> List[Point]:
    """Decode an internal array back to public points"""
    if space.kind == SpaceKind.BINARY_SHIFT:
        return [decode_word(space, c) for c in arr]
    if space.kind == SpaceKind.ANNULUS:
        return [(float(r), float(t)) for r, t in arr]
    return [float(x) for x in arr]


def canonicalize(space: PhaseSpace, arr: np.ndarray) -> np.ndarray:
    """Bring internal coordinates back into range after arithmetic"""
    if space.kind == SpaceKind.CIRCLE:
        return _wrap(np.asarray(arr, dtype=float))
    if space.kind == SpaceKind.ANNULUS:
        out = np.array(arr, dtype=float, copy=True)
        out[..., 1] = _wrap(out[..., 1])
        return out
    if space.kind == SpaceKind.UNIT_INTERVAL:
        return np.clip(np.asarray(arr, dtype=float), 0.0, 1.0)
    return np.asarray(arr, dtype=np.int64)


# ---------------------------------------------------------------------------
# Metric


def arc_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    return np.minimum(d, 1.0 - d)


def _shift_distance(space: PhaseSpace, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.bitwise_xor(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    # frexp exponent equals bit_length exactly for integers below 2^53
    bit_length = np.frexp(x.astype(float))[1]
    k = space.depth - bit_length
    return np.where(x == 0, 0.0, np.ldexp(1.0, -k))


def pairwise_distance(space: PhaseSpace, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Distance matrix between two internal point arrays.

    Args:
        space: Shared space
        a: Internal array of m points
        b: Internal array of k points

    Returns:
        (m, k) matrix of distances
    """
    if space.kind == SpaceKind.ANNULUS:
        a = np.asarray(a, dtype=float).reshape(-1, 2)
        b = np.asarray(b, dtype=float).reshape(-1, 2)
        dr = np.abs(a[:, None, 0] - b[None, :, 0])
        return np.maximum(dr, arc_distance(a[:, None, 1], b[None, :, 1]))
    a = np.asarray(a)
    b = np.asarray(b)
    return elementwise_distance(space, a[:, None], b[None, :])


def elementwise_distance(space: PhaseSpace, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances between aligned internal arrays (broadcasting over leading axes)"""
    if space.kind == SpaceKind.UNIT_INTERVAL:
        return np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    if space.kind == SpaceKind.CIRCLE:
        return arc_distance(a, b)
    if space.kind == SpaceKind.ANNULUS:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return np.maximum(np.abs(a[..., 0] - b[..., 0]), arc_distance(a[..., 1], b[..., 1]))
    return _shift_distance(space, a, b)


def distance(space: PhaseSpace, p: Point, q: Point) -> float:
    """
    Distance between two public points.

    Raises:
        InputError: if a point does not belong to the space
    """
    pa = as_array(space, [p])
    qa = as_array(space, [q])
    return float(elementwise_distance(space, pa, qa)[0])


def diameter(space: PhaseSpace) -> float:
    """Exact diameter of the space"""
    return 0.5 if space.kind == SpaceKind.CIRCLE else 1.0


# ---------------------------------------------------------------------------
# Reference measure


def sample_reference_array(space: PhaseSpace, seed: int, count: int) -> np.ndarray:
    """Internal-layout i.i.d. draws from the reference measure"""
    if count < 1:
        raise InputError("count must be at least 1")
    rng = np.random.default_rng(seed)
    if space.kind == SpaceKind.ANNULUS:
        return rng.random((count, 2))
    if space.kind == SpaceKind.BINARY_SHIFT:
        bits = rng.integers(0, 2, size=(count, space.depth), dtype=np.int64)
        weights = np.left_shift(np.int64(1), np.arange(space.depth - 1, -1, -1, dtype=np.int64))
        return bits @ weights
    return rng.random(count)


def sample_reference(space: PhaseSpace, seed: int, count: int) -> List[Point]:
    """
    Draw count i.i.d. points from the reference measure.

    Lebesgue for the interval, circle and annulus; the uniform cylinder
    (fair coin) measure for the shift. Deterministic given seed.
    """
    return to_points(space, sample_reference_array(space, seed, count))
