# systems/bowen.py

"""
Bowen eye surrogate: a planar heteroclinic cycle between two hyperbolic
saddles A and B, realised as a passage-map recursion.

Inside the linearisation box of a saddle with stable eigenvalue s and unstable
eigenvalue u, an orbit entering at offset u_in leaves after
``ln(box_h / u_in) / u`` time units at offset ``box_h * (u_in / box_h)**(s / u)``.
The global connections are the identity on offsets and take transit_time.

The recursion runs on L = ln(box_h / u), which turns each passage into
``L -> L * s / u`` and never underflows.

Time averages of an observable with values g_A, g_B at the saddles oscillate
between the Gaunersdorfer values

    upper = sigma / (1 + sigma) * g_A + 1 / (1 + sigma) * g_B
    lower = lam / (1 + lam) * g_B + 1 / (1 + lam) * g_A

with lam = alpha_minus / beta_plus and sigma = beta_minus / alpha_plus, unless
alpha_minus * beta_minus == alpha_plus * beta_plus, in which case they converge.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.errors import DegenerateInputError, InputError

logger = logging.getLogger(__name__)

# Locations of the surrogate's occupation measure on the unit interval
LOCATION_A = 1.0
LOCATION_B = 0.0
LOCATION_TRANSIT = 0.5


class Saddle(str, Enum):
    A = "A"
    B = "B"


class BowenParams(BaseModel):
    """Saddle eigenvalues, box size, transit time and observable values"""
    model_config = ConfigDict(frozen=True)

    alpha_plus: float = Field(gt=0.0)
    alpha_minus: float = Field(gt=0.0)
    beta_plus: float = Field(gt=0.0)
    beta_minus: float = Field(gt=0.0)
    box_h: float = Field(default=1.0, gt=0.0)
    transit_time: float = Field(default=1.0, ge=0.0)
    g_A: float = 1.0
    g_B: float = 0.0

    @property
    def lam(self) -> float:
        return self.alpha_minus / self.beta_plus

    @property
    def sigma(self) -> float:
        return self.beta_minus / self.alpha_plus

    @property
    def non_degenerate(self) -> bool:
        return self.alpha_minus * self.beta_minus != self.alpha_plus * self.beta_plus

    @property
    def upper_average(self) -> float:
        s = self.sigma
        return s / (1.0 + s) * self.g_A + 1.0 / (1.0 + s) * self.g_B

    @property
    def lower_average(self) -> float:
        lam = self.lam
        return lam / (1.0 + lam) * self.g_B + 1.0 / (1.0 + lam) * self.g_A

    def eigenvalues(self, saddle: Saddle) -> Tuple[float, float]:
        """(stable, unstable) eigenvalues at the saddle"""
        if saddle == Saddle.A:
            return self.alpha_minus, self.alpha_plus
        return self.beta_minus, self.beta_plus

    def observable(self, saddle: Saddle) -> float:
        return self.g_A if saddle == Saddle.A else self.g_B

    @property
    def transit_value(self) -> float:
        return 0.5 * (self.g_A + self.g_B)


@dataclass(frozen=True)
class BowenRecord:
    """State at the exit of one saddle box"""
    passage: int
    saddle: Saddle
    sojourn: float
    exit_time: float
    average: float


def saddle_passage(params: BowenParams, saddle: Saddle, u_in: float) -> Tuple[float, float]:
    """
    Pass once through a saddle box.

    Args:
        params: Cycle parameters
        saddle: Which saddle
        u_in: Entry offset from the stable manifold, 0 < u_in <= box_h

    Returns:
        (u_out, sojourn)
    """
    if not u_in > 0.0:
        raise DegenerateInputError("u_in <= 0 lies on the heteroclinic cycle")
    if u_in > params.box_h:
        raise InputError(f"u_in = {u_in} exceeds box_h = {params.box_h}")
    stable, unstable = params.eigenvalues(saddle)
    log_depth = math.log(params.box_h / u_in)
    sojourn = log_depth / unstable
    u_out = params.box_h * math.exp(-log_depth * stable / unstable)
    return u_out, sojourn


def _passages(params: BowenParams, u0: float, passages: int) -> List[Tuple[Saddle, float]]:
    """(saddle, sojourn) for each passage, computed on L = ln(box_h / u)"""
    if not u0 > 0.0:
        raise DegenerateInputError("u0 <= 0 lies on the heteroclinic cycle")
    if not u0 < params.box_h:
        raise InputError(f"u0 = {u0} must be below box_h = {params.box_h}")
    if passages < 2:
        raise InputError("passages must be at least 2")

    log_depth = math.log(params.box_h / u0)
    out: List[Tuple[Saddle, float]] = []
    saddle = Saddle.A
    for _ in range(passages):
        stable, unstable = params.eigenvalues(saddle)
        out.append((saddle, log_depth / unstable))
        log_depth = log_depth * stable / unstable
        saddle = Saddle.B if saddle == Saddle.A else Saddle.A
    return out


def bowen_running_averages(params: BowenParams, u0: float, passages: int) -> List[BowenRecord]:
    """
    Running time averages of g along an orbit spiralling onto the cycle.

    The orbit starts entering A's box. Each passage is a sojourn followed by a
    transit; a record is taken at the exit of every box.

    Args:
        params: Cycle parameters
        u0: Initial offset, 0 < u0 < box_h
        passages: Number of box passages (>= 2)

    Returns:
        One BowenRecord per passage
    """
    records: List[BowenRecord] = []
    time = 0.0
    integral = 0.0
    for k, (saddle, sojourn) in enumerate(_passages(params, u0, passages), start=1):
        time += sojourn
        integral += params.observable(saddle) * sojourn
        average = integral / time if time > 0.0 else params.observable(saddle)
        records.append(BowenRecord(k, saddle, sojourn, time, average))
        time += params.transit_time
        integral += params.transit_value * params.transit_time
    logger.debug(f"Bowen surrogate: {passages} passages, final time {time:.6g}")
    return records


def total_time(params: BowenParams, u0: float, passages: int) -> float:
    """Time after the given number of complete passages (sojourn plus transit each)"""
    time = 0.0
    for _, sojourn in _passages(params, u0, passages):
        time += sojourn
        time += params.transit_time
    return time


def bowen_segments(params: BowenParams, u0: float, passages: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Occupation segments of the surrogate orbit.

    Returns:
        (locations, durations): alternating saddle and transit segments, with
        A at 1.0, B at 0.0 and transit at 0.5 on the unit interval
    """
    locations: List[float] = []
    durations: List[float] = []
    for saddle, sojourn in _passages(params, u0, passages):
        locations.append(LOCATION_A if saddle == Saddle.A else LOCATION_B)
        durations.append(sojourn)
        locations.append(LOCATION_TRANSIT)
        durations.append(params.transit_time)
    return np.asarray(locations), np.asarray(durations)


def occupation_masses(params: BowenParams, u0: float, passages: int,
                      times: np.ndarray) -> np.ndarray:
    """
    Fraction of [0, t] spent at B, in transit and at A for every t in times.

    Returns:
        (len(times), 3) array with columns ordered B (0.0), transit (0.5), A (1.0)
    """
    locations, durations = bowen_segments(params, u0, passages)
    ends = np.cumsum(durations)
    starts = ends - durations
    times = np.asarray(times, dtype=float)
    if times.size and (times.min() <= 0.0 or times.max() > ends[-1] * (1.0 + 1e-12)):
        raise InputError(f"occupation times must lie in (0, {ends[-1]:.6g}]")

    # overlap of each segment with [0, t]
    overlap = np.clip(times[:, None] - starts[None, :], 0.0, durations[None, :])
    masses = np.zeros((len(times), 3))
    for column, location in enumerate((LOCATION_B, LOCATION_TRANSIT, LOCATION_A)):
        masses[:, column] = overlap[:, locations == location].sum(axis=1)
    return masses / times[:, None]
