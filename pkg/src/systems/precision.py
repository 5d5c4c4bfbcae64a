# systems/precision.py

"""
Big-integer fixed-point orbit engines for expanding maps.

A point x in [0, 1] is held as the integer X = floor(x * 2^P). Every update is
exact integer arithmetic followed by one floor, so the error introduced per
step is at most 2^-P and an error made at step j reaches step k amplified by
at most slope^(k - j). Precision is therefore tapered: once only ``r`` points
remain to be emitted, ``r * log2(slope) + 64`` bits suffice and the low bits are
dropped.

Floats convert exactly in both directions: a double is a dyadic rational, and
Python's int / int true division is correctly rounded.
"""

import logging
import math

import numpy as np

logger = logging.getLogger(__name__)

GUARD_BITS = 64
_TAPER_STEP = 256


def to_fixed(x: float, bits: int) -> int:
    """floor(x * 2^bits) computed exactly"""
    num, den = float(x).as_integer_ratio()
    return (num << bits) // den


def from_fixed(value: int, bits: int) -> float:
    """Correctly rounded value / 2^bits"""
    return value / (1 << bits)


def _dyadic(value: float):
    """(a, e) with value == a / 2^e"""
    a, den = float(value).as_integer_ratio()
    return a, den.bit_length() - 1


def _bits_needed(remaining: int, log2_slope: float) -> int:
    return math.ceil(remaining * log2_slope) + GUARD_BITS


def logistic_orbit(lam: float, x0: float, n: int, bits: int, flip: bool = False) -> np.ndarray:
    """
    Orbit of x -> lam * x * (1 - x) (or 1 - lam * x * (1 - x) when flip).

    Args:
        lam: Parameter in [0, 4] (any double; used exactly)
        x0: Initial point in [0, 1]
        n: Number of points to emit
        bits: Working precision at the start

    Returns:
        n doubles, each the correctly rounded fixed-point iterate
    """
    a, e = _dyadic(lam)
    log2_slope = max(0.0, math.log2(lam)) if lam > 0 else 0.0
    p = bits
    value = to_fixed(x0, p)
    out = np.empty(n)
    for k in range(n):
        out[k] = from_fixed(value, p)
        if k == n - 1:
            break
        scale = 1 << p
        value = (a * value * (scale - value)) >> (p + e)
        if flip:
            value = scale - value
        if k % _TAPER_STEP == 0:
            target = max(_bits_needed(n - 1 - k, log2_slope), GUARD_BITS)
            if p - target >= GUARD_BITS:
                value >>= p - target
                p = target
    logger.debug(f"logistic orbit: lam={lam!r}, n={n}, start bits={bits}, end bits={p}")
    return out


def times_b_orbit(b: int, x0: float, n: int, bits: int) -> np.ndarray:
    """
    Orbit of theta -> b * theta mod 1.

    Even b with a dyadic x0 reaches 0 exactly after finitely many steps; that
    is the true orbit of the double x0, not a precision artefact.
    """
    log2_slope = math.log2(b)
    p = bits
    value = to_fixed(x0, p)
    out = np.empty(n)
    for k in range(n):
        out[k] = from_fixed(value, p)
        if k == n - 1:
            break
        value = (b * value) & ((1 << p) - 1)
        if k % _TAPER_STEP == 0:
            target = _bits_needed(n - 1 - k, log2_slope)
            if p - target >= GUARD_BITS:
                value >>= p - target
                p = target
    # the map is taken mod 1; a rounded emitted value of 1.0 is the point 0
    out[out >= 1.0] = 0.0
    logger.debug(f"times-{b} orbit: n={n}, start bits={bits}, end bits={p}")
    return out
