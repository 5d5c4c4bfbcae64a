# systems/orbits.py

"""
step and orbit for every family.

Expanding interval and circle maps iterate in big-integer fixed point
(systems.precision). Rotations and Anosov-Katok maps use their closed forms
theta_k = theta_0 + k * alpha, conjugated by h o g for the latter, which equal
iterating ``step`` without accumulating rounding error.
"""

import logging
from typing import List, Optional

import numpy as np

from src.core.errors import InputError
from src.phase_space import PhaseSpace, Point, as_array, canonicalize, to_points
from src.systems.families import (
    AnosovKatok,
    BowenSurrogate,
    ExpandingTimes,
    Logistic,
    OrbitBudget,
    QuadraticInterval,
    Rotation,
    ShiftOnBlocks,
    SystemSpec,
)
from src.systems.precision import logistic_orbit, times_b_orbit
from src.systems.symbolic import omega_orbit_codes, omega_prefix

logger = logging.getLogger(__name__)

_CIRCLE = PhaseSpace.circle()


def _bowen_refusal(spec: SystemSpec) -> InputError:
    return InputError(
        f"{spec.label} is a continuous-time surrogate; use systems.bowen for its passages"
    )


def orbit_array(spec: SystemSpec, x0: Optional[Point], budget: OrbitBudget) -> np.ndarray:
    """
    Orbit [x0, f(x0), ..., f^(n-1)(x0)] in the internal array layout.

    Args:
        spec: System
        x0: Initial point (for ShiftOnBlocks: None or the depth-prefix of omega)
        budget: Orbit length and precision

    Returns:
        Array of budget.iterations points

    Raises:
        ConfigurationError: precision budget too small for the family
        InputError: point outside the space, or family without discrete orbits
    """
    budget.check(spec)
    n = budget.iterations
    family = spec.family
    space = spec.space

    if isinstance(family, BowenSurrogate):
        raise _bowen_refusal(spec)

    if isinstance(family, ShiftOnBlocks):
        prefix = omega_prefix(family.blocks, space.depth)
        if x0 is not None and as_array(space, [x0])[0] != as_array(space, [prefix])[0]:
            raise InputError("shift_on_blocks orbits start at the block point omega")
        return omega_orbit_codes(family.blocks, space.depth, n)

    if x0 is None:
        raise InputError(f"{spec.label} needs an initial point")
    start = as_array(space, [x0])[0]

    if isinstance(family, Logistic):
        return logistic_orbit(family.lam, float(start), n, budget.precision_bits)
    if isinstance(family, QuadraticInterval):
        return logistic_orbit(family.lam, float(start), n, budget.precision_bits, flip=True)
    if isinstance(family, ExpandingTimes):
        return times_b_orbit(family.b, float(start), n, budget.precision_bits)
    if isinstance(family, Rotation):
        return canonicalize(space, float(start) + np.arange(n) * family.alpha)
    if isinstance(family, AnosovKatok):
        conjugacy = family.conjugacy()
        base = conjugacy.inverse(np.asarray(start).reshape(1, 2))[0]
        circle = np.column_stack([
            np.full(n, base[0]),
            canonicalize(_CIRCLE, base[1] + np.arange(n) * family.alpha),
        ])
        return canonicalize(space, conjugacy.forward(circle))
    raise InputError(f"unsupported family {family.name}")


def orbit(spec: SystemSpec, x0: Optional[Point], budget: OrbitBudget) -> List[Point]:
    """Orbit as a list of public points (see orbit_array)"""
    return to_points(spec.space, orbit_array(spec, x0, budget))


def step(spec: SystemSpec, x: Point) -> Point:
    """
    Image of one point.

    For ShiftOnBlocks the truncated word is shifted left and the vacated last
    symbol filled with 0, exact up to 2^-(depth - 1).
    """
    family = spec.family
    space = spec.space
    if isinstance(family, BowenSurrogate):
        raise _bowen_refusal(spec)

    start = as_array(space, [x])
    if isinstance(family, ShiftOnBlocks):
        mask = (1 << space.depth) - 1
        return to_points(space, np.array([(int(start[0]) << 1) & mask], dtype=np.int64))[0]
    if isinstance(family, Rotation):
        return to_points(space, canonicalize(space, start + family.alpha))[0]
    if isinstance(family, AnosovKatok):
        conjugacy = family.conjugacy()
        base = conjugacy.inverse(start)
        base[:, 1] = canonicalize(_CIRCLE, base[:, 1] + family.alpha)
        return to_points(space, canonicalize(space, conjugacy.forward(base)))[0]

    budget = OrbitBudget.for_system(spec, 2)
    return to_points(space, orbit_array(spec, x, budget)[1:])[0]
