# systems/diffeo.py

"""
Piecewise-linear annulus diffeomorphisms built from primitive warps.

A DiffeoSpec is an ordered list of primitives applied left to right. Each
primitive is triangular: it changes one coordinate as a monotone function of
itself, with coefficients depending only on the other coordinate, so the
inverse is an exact piecewise-linear inversion and the Jacobian determinant is
the fibre derivative.

Primitives:

- FiberWarp: X' = (1 - w(Y)) * base(X) + w(Y) * target(X), where base and target
  are increasing piecewise-linear homeomorphisms of [0, 1] and w is a
  piecewise-linear blend in [0, 1]. With axis "r" the radius is warped and w
  is a periodic function of the angle; with axis "theta" the angle is warped
  (as a degree-one circle map fixing 0) and w is a function of the radius.
- RadialShear: theta' = theta + c(r), c piecewise linear.

Every primitive carries a covering degree q. A primitive with degree q is the
lift of its q = 1 version through pi(r, theta) = (r, q * theta) that is the
identity wherever the q = 1 version is, so lifting a whole DiffeoSpec only
multiplies the degrees.
"""

import logging
from enum import Enum
from typing import Annotated, List, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.phase_space import PhaseSpace, elementwise_distance

logger = logging.getLogger(__name__)


class FiberAxis(str, Enum):
    """Coordinate changed by a FiberWarp"""
    RADIUS = "r"
    ANGLE = "theta"


def _strictly_increasing(values: List[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


def _pl_slopes(knots: np.ndarray, values: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Slope of the piecewise-linear function on the segment containing x"""
    j = np.clip(np.searchsorted(knots, x, side='right') - 1, 0, len(knots) - 2)
    return (values[j + 1] - values[j]) / (knots[j + 1] - knots[j])


class FiberWarp(BaseModel):
    """Blend of two monotone reparameterizations of one coordinate"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["fiber_warp"] = "fiber_warp"
    axis: FiberAxis
    knots: List[float]
    base_values: List[float]
    target_values: List[float]
    weight_knots: List[float] = Field(default_factory=lambda: [0.0, 1.0])
    weight_values: List[float] = Field(default_factory=lambda: [1.0, 1.0])
    q: int = Field(default=1, ge=1)

    @model_validator(mode='after')
    def _check_shape(self) -> 'FiberWarp':
        n = len(self.knots)
        if n < 2 or len(self.base_values) != n or len(self.target_values) != n:
            raise ValueError("knots, base_values and target_values need equal length >= 2")
        for name, seq in (('knots', self.knots), ('base_values', self.base_values),
                          ('target_values', self.target_values)):
            if seq[0] != 0.0 or seq[-1] != 1.0:
                raise ValueError(f"{name} must start at 0 and end at 1")
            if not _strictly_increasing(seq):
                raise ValueError(f"{name} must be strictly increasing")
        if len(self.weight_knots) != len(self.weight_values) or len(self.weight_knots) < 2:
            raise ValueError("weight_knots and weight_values need equal length >= 2")
        if self.weight_knots[0] != 0.0 or self.weight_knots[-1] != 1.0:
            raise ValueError("weight_knots must start at 0 and end at 1")
        if not _strictly_increasing(self.weight_knots):
            raise ValueError("weight_knots must be strictly increasing")
        if any(w < 0.0 or w > 1.0 for w in self.weight_values):
            raise ValueError("weight_values must lie in [0, 1]")
        if self.axis == FiberAxis.RADIUS and self.weight_values[0] != self.weight_values[-1]:
            raise ValueError("an angular weight must be periodic")
        return self

    def _arrays(self):
        return (np.asarray(self.knots), np.asarray(self.base_values),
                np.asarray(self.target_values))

    def _weight(self, pts: np.ndarray) -> np.ndarray:
        if self.axis == FiberAxis.RADIUS:
            arg = np.mod(self.q * pts[:, 1], 1.0)
        else:
            arg = pts[:, 0]
        return np.interp(arg, self.weight_knots, self.weight_values)

    def _fibre(self, pts: np.ndarray):
        """Fibre coordinate in [0, 1] plus the integer sheet for angular warps"""
        if self.axis == FiberAxis.RADIUS:
            return pts[:, 0], None
        s = self.q * pts[:, 1]
        sheet = np.floor(s)
        return s - sheet, sheet

    def _place(self, pts: np.ndarray, u: np.ndarray, sheet) -> np.ndarray:
        out = np.array(pts, dtype=float, copy=True)
        if self.axis == FiberAxis.RADIUS:
            out[:, 0] = u
        else:
            theta = (sheet + u) / self.q
            theta = np.mod(theta, 1.0)
            out[:, 1] = np.where(theta >= 1.0, 0.0, theta)
        return out

    def forward(self, pts: np.ndarray) -> np.ndarray:
        knots, base, target = self._arrays()
        w = self._weight(pts)
        u, sheet = self._fibre(pts)
        image = (1.0 - w) * np.interp(u, knots, base) + w * np.interp(u, knots, target)
        return self._place(pts, image, sheet)

    def inverse(self, pts: np.ndarray) -> np.ndarray:
        knots, base, target = self._arrays()
        w = self._weight(pts)
        v, sheet = self._fibre(pts)
        # per-point fibre map values at the knots
        table = (1.0 - w)[:, None] * base[None, :] + w[:, None] * target[None, :]
        j = np.clip((table <= v[:, None]).sum(axis=1) - 1, 0, len(knots) - 2)
        rows = np.arange(len(v))
        lo = table[rows, j]
        hi = table[rows, j + 1]
        frac = (v - lo) / (hi - lo)
        u = knots[j] + frac * (knots[j + 1] - knots[j])
        return self._place(pts, u, sheet)

    def jacobian(self, pts: np.ndarray) -> np.ndarray:
        knots, base, target = self._arrays()
        w = self._weight(pts)
        u, _ = self._fibre(pts)
        return (1.0 - w) * _pl_slopes(knots, base, u) + w * _pl_slopes(knots, target, u)


class RadialShear(BaseModel):
    """theta' = theta + c(r) with c piecewise linear"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["radial_shear"] = "radial_shear"
    knots: List[float]
    offsets: List[float]
    q: int = Field(default=1, ge=1)

    @model_validator(mode='after')
    def _check_shape(self) -> 'RadialShear':
        if len(self.knots) < 2 or len(self.knots) != len(self.offsets):
            raise ValueError("knots and offsets need equal length >= 2")
        if self.knots[0] != 0.0 or self.knots[-1] != 1.0 or not _strictly_increasing(self.knots):
            raise ValueError("knots must increase strictly from 0 to 1")
        return self

    def _shifted(self, pts: np.ndarray, sign: float) -> np.ndarray:
        out = np.array(pts, dtype=float, copy=True)
        theta = np.mod(out[:, 1] + sign * np.interp(out[:, 0], self.knots, self.offsets) / self.q, 1.0)
        out[:, 1] = np.where(theta >= 1.0, 0.0, theta)
        return out

    def forward(self, pts: np.ndarray) -> np.ndarray:
        return self._shifted(pts, 1.0)

    def inverse(self, pts: np.ndarray) -> np.ndarray:
        return self._shifted(pts, -1.0)

    def jacobian(self, pts: np.ndarray) -> np.ndarray:
        return np.ones(len(pts))


Primitive = Annotated[Union[FiberWarp, RadialShear], Field(discriminator='kind')]


class DiffeoSpec(BaseModel):
    """Ordered composition of primitive warps (first primitive applied first)"""
    model_config = ConfigDict(frozen=True)

    primitives: List[Primitive] = Field(default_factory=list)

    @classmethod
    def identity(cls) -> 'DiffeoSpec':
        return cls()

    @property
    def is_identity(self) -> bool:
        return not self.primitives

    def then(self, other: 'DiffeoSpec') -> 'DiffeoSpec':
        """Composition applying self first, then other"""
        return DiffeoSpec(primitives=list(self.primitives) + list(other.primitives))

    def forward(self, pts: np.ndarray) -> np.ndarray:
        out = np.asarray(pts, dtype=float).reshape(-1, 2)
        for primitive in self.primitives:
            out = primitive.forward(out)
        return out

    def inverse(self, pts: np.ndarray) -> np.ndarray:
        out = np.asarray(pts, dtype=float).reshape(-1, 2)
        for primitive in reversed(self.primitives):
            out = primitive.inverse(out)
        return out

    def jacobian_determinant(self, pts: np.ndarray) -> np.ndarray:
        """Determinant of the derivative at each point (chain rule through the primitives)"""
        current = np.asarray(pts, dtype=float).reshape(-1, 2)
        det = np.ones(len(current))
        for primitive in self.primitives:
            det = det * primitive.jacobian(current)
            current = primitive.forward(current)
        return det

    def to_json(self) -> str:
        return self.model_dump_json()

    @classmethod
    def from_json(cls, text: str) -> 'DiffeoSpec':
        return cls.model_validate_json(text)


def lift_diffeo(g_hat: DiffeoSpec, q: int) -> DiffeoSpec:
    """
    Lift g_hat through the covering pi(r, theta) = (r, q * theta).

    The lift satisfies pi o g = g_hat o pi, is the identity wherever g_hat is,
    and commutes with the rotation by 1/q.

    Args:
        g_hat: Map to lift
        q: Covering degree (q = 1 returns g_hat unchanged)
    """
    if q < 1:
        raise ValueError("covering degree q must be >= 1")
    if q == 1:
        return g_hat
    lifted = [p.model_copy(update={'q': p.q * q}) for p in g_hat.primitives]
    return DiffeoSpec(primitives=lifted)


def annulus_grid(grid_n: int, r_range=(0.0, 1.0), theta_range=(0.0, 1.0)) -> np.ndarray:
    """grid_n x grid_n points; radii include both ends, angles exclude the upper end"""
    r = np.linspace(r_range[0], r_range[1], grid_n)
    theta = theta_range[0] + (theta_range[1] - theta_range[0]) * np.arange(grid_n) / grid_n
    rr, tt = np.meshgrid(r, theta, indexing='ij')
    return np.column_stack([rr.ravel(), tt.ravel()])


def roundtrip_error(spec: DiffeoSpec, grid_n: int = 100) -> float:
    """Largest annulus distance between p and forward(inverse(p)) or inverse(forward(p))"""
    space = PhaseSpace.annulus()
    pts = annulus_grid(grid_n)
    a = elementwise_distance(space, spec.forward(spec.inverse(pts)), pts)
    b = elementwise_distance(space, spec.inverse(spec.forward(pts)), pts)
    return float(max(a.max(), b.max()))
