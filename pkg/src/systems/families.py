# systems/families.py

"""
Parameterised dynamical families and the SystemSpec that binds one member to
its phase space.

Families are pydantic models discriminated by ``name`` so a SystemSpec
round-trips through JSON:

    {"family": {"name": "logistic", "lam": 4.0}, "space": {"kind": "unit_interval"}}
"""

import logging
import math
from typing import Annotated, Any, List, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

from src.core.errors import ConfigurationError
from src.phase_space import PhaseSpace, SpaceKind
from src.systems.bowen import BowenParams
from src.systems.diffeo import DiffeoSpec

logger = logging.getLogger(__name__)

GUARD_BITS = 64
MACHINE_BITS = 53


class Logistic(BaseModel):
    """x -> lam * x * (1 - x) on [0, 1]"""
    model_config = ConfigDict(frozen=True)

    name: Literal["logistic"] = "logistic"
    lam: float

    @field_validator('lam')
    @classmethod
    def _lam_range(cls, v: float) -> float:
        if not 0.0 <= v <= 4.0:
            raise ValueError(f"lam = {v} must lie in the range [0,4]")
        return v


class Rotation(BaseModel):
    """theta -> theta + alpha mod 1; alpha = 0 is the identity"""
    model_config = ConfigDict(frozen=True)

    name: Literal["rotation"] = "rotation"
    alpha: float

    @field_validator('alpha')
    @classmethod
    def _alpha_range(cls, v: float) -> float:
        if not 0.0 <= v < 1.0:
            raise ValueError(f"alpha = {v} must lie in the range [0,1)")
        return v


class ExpandingTimes(BaseModel):
    """theta -> b * theta mod 1"""
    model_config = ConfigDict(frozen=True)

    name: Literal["expanding_times"] = "expanding_times"
    b: int = Field(ge=2)


class ShiftOnBlocks(BaseModel):
    """
    Shift orbit of the block point omega: blocks of the given lengths,
    alternately all zeros and 0101..., the last block continued forever.
    """
    model_config = ConfigDict(frozen=True)

    name: Literal["shift_on_blocks"] = "shift_on_blocks"
    blocks: List[int] = Field(min_length=1)

    @field_validator('blocks')
    @classmethod
    def _positive(cls, v: List[int]) -> List[int]:
        if any(n < 1 for n in v):
            raise ValueError("block lengths must be positive")
        return v


class QuadraticInterval(BaseModel):
    """
    z -> z^2 + c on its invariant interval [-beta, beta], rescaled to [0, 1].

    In the rescaled coordinate this is x -> 1 - lam * x * (1 - x) with
    lam = 1 + sqrt(1 - 4c).
    """
    model_config = ConfigDict(frozen=True)

    name: Literal["quadratic_interval"] = "quadratic_interval"
    c: float

    @field_validator('c')
    @classmethod
    def _c_range(cls, v: float) -> float:
        if not -2.0 <= v <= 0.25:
            raise ValueError(f"c = {v} must lie in the range [-2,0.25]")
        return v

    @property
    def lam(self) -> float:
        return 1.0 + math.sqrt(1.0 - 4.0 * self.c)


class AnosovKatok(BaseModel):
    """f' = h o g o R_alpha o g^-1 o h^-1 on the annulus"""
    model_config = ConfigDict(frozen=True)

    name: Literal["anosov_katok"] = "anosov_katok"
    g: DiffeoSpec = Field(default_factory=DiffeoSpec)
    h: DiffeoSpec = Field(default_factory=DiffeoSpec)
    alpha: float = Field(gt=0.0, lt=1.0)

    def conjugacy(self) -> DiffeoSpec:
        """h o g as a single DiffeoSpec (g applied first)"""
        return self.g.then(self.h)


class BowenSurrogate(BaseModel):
    """Continuous-time heteroclinic cycle surrogate (see systems.bowen)"""
    model_config = ConfigDict(frozen=True)

    name: Literal["bowen_surrogate"] = "bowen_surrogate"
    params: BowenParams


Family = Annotated[
    Union[Logistic, Rotation, ExpandingTimes, ShiftOnBlocks, QuadraticInterval,
          AnosovKatok, BowenSurrogate],
    Field(discriminator='name'),
]

_SPACE_FOR_FAMILY = {
    'logistic': SpaceKind.UNIT_INTERVAL,
    'rotation': SpaceKind.CIRCLE,
    'expanding_times': SpaceKind.CIRCLE,
    'shift_on_blocks': SpaceKind.BINARY_SHIFT,
    'quadratic_interval': SpaceKind.UNIT_INTERVAL,
    'anosov_katok': SpaceKind.ANNULUS,
    'bowen_surrogate': SpaceKind.UNIT_INTERVAL,
}


class SystemSpec(BaseModel):
    """A concrete member of a family together with its phase space"""
    model_config = ConfigDict(frozen=True)

    family: Family
    space: PhaseSpace

    @model_validator(mode='before')
    @classmethod
    def _default_space(cls, data: Any, info: ValidationInfo) -> Any:
        """Fill in the family's space when omitted; shift depth may come from the context"""
        if not isinstance(data, dict) or data.get('space') is not None:
            return data
        family = data.get('family')
        name = family.get('name') if isinstance(family, dict) else getattr(family, 'name', None)
        if name not in _SPACE_FOR_FAMILY:
            return data
        space: dict = {'kind': _SPACE_FOR_FAMILY[name].value}
        depth = (info.context or {}).get('shift_depth')
        if name == 'shift_on_blocks' and depth is not None:
            space['depth'] = depth
        return {**data, 'space': space}

    @model_validator(mode='after')
    def _space_matches(self) -> 'SystemSpec':
        expected = _SPACE_FOR_FAMILY[self.family.name]
        if self.space.kind != expected:
            raise ValueError(
                f"family {self.family.name} lives on {expected.value}, not {self.space.kind.value}"
            )
        return self

    @classmethod
    def logistic(cls, lam: float) -> 'SystemSpec':
        return cls(family=Logistic(lam=lam), space=PhaseSpace.unit_interval())

    @classmethod
    def rotation(cls, alpha: float) -> 'SystemSpec':
        return cls(family=Rotation(alpha=alpha), space=PhaseSpace.circle())

    @classmethod
    def identity(cls) -> 'SystemSpec':
        return cls.rotation(0.0)

    @classmethod
    def expanding_times(cls, b: int) -> 'SystemSpec':
        return cls(family=ExpandingTimes(b=b), space=PhaseSpace.circle())

    @classmethod
    def shift_on_blocks(cls, blocks: List[int], depth: int = 20) -> 'SystemSpec':
        return cls(family=ShiftOnBlocks(blocks=blocks), space=PhaseSpace.binary_shift(depth))

    @classmethod
    def quadratic_interval(cls, c: float) -> 'SystemSpec':
        return cls(family=QuadraticInterval(c=c), space=PhaseSpace.unit_interval())

    @classmethod
    def bowen(cls, params: BowenParams) -> 'SystemSpec':
        return cls(family=BowenSurrogate(params=params), space=PhaseSpace.unit_interval())

    @property
    def label(self) -> str:
        f = self.family
        if isinstance(f, Logistic):
            return f"logistic(lam={f.lam!r})"
        if isinstance(f, Rotation):
            return f"rotation(alpha={f.alpha!r})"
        if isinstance(f, ExpandingTimes):
            return f"expanding_times(b={f.b})"
        if isinstance(f, ShiftOnBlocks):
            return f"shift_on_blocks({len(f.blocks)} blocks, depth={self.space.depth})"
        if isinstance(f, QuadraticInterval):
            return f"quadratic_interval(c={f.c!r})"
        if isinstance(f, AnosovKatok):
            return f"anosov_katok(alpha={f.alpha!r})"
        return "bowen_surrogate"


def slope_bound(spec: SystemSpec) -> float:
    """Upper bound on |f'| for the families iterated in fixed point, 1 otherwise"""
    f = spec.family
    if isinstance(f, Logistic):
        return max(1.0, f.lam)
    if isinstance(f, QuadraticInterval):
        return max(1.0, f.lam)
    if isinstance(f, ExpandingTimes):
        return float(f.b)
    return 1.0


def uses_fixed_point(spec: SystemSpec) -> bool:
    return isinstance(spec.family, (Logistic, QuadraticInterval, ExpandingTimes))


def required_precision_bits(spec: SystemSpec, iterations: int) -> int:
    """Bits needed so that every emitted point is accurate to machine precision"""
    if not uses_fixed_point(spec):
        return MACHINE_BITS
    return math.ceil(iterations * math.log2(slope_bound(spec))) + GUARD_BITS


class OrbitBudget(BaseModel):
    """Orbit length and working precision"""
    model_config = ConfigDict(frozen=True)

    iterations: int = Field(ge=1)
    precision_bits: int = Field(default=MACHINE_BITS, ge=1)

    @classmethod
    def for_system(cls, spec: SystemSpec, iterations: int) -> 'OrbitBudget':
        """Smallest budget satisfying the precision rule for spec"""
        return cls(iterations=iterations,
                   precision_bits=max(MACHINE_BITS, required_precision_bits(spec, iterations)))

    def check(self, spec: SystemSpec) -> None:
        """
        Refuse budgets that cannot support the requested orbit.

        Raises:
            ConfigurationError: precision_bits below iterations * log2(slope) + 64
        """
        needed = required_precision_bits(spec, self.iterations)
        if uses_fixed_point(spec) and self.precision_bits < needed:
            raise ConfigurationError(
                f"{spec.label}: {self.iterations} iterations need {needed} precision bits, "
                f"budget has {self.precision_bits}"
            )
