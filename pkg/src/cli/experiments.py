# cli/experiments.py

"""
Experiment configuration.

One JSON file describes one run. It is parsed into ExperimentConfig (structure
and ranges) and then preflighted against the lab settings (preconditions that
depend on defaults, such as the Bowen box size). ``validate`` reports both
stages as a flat list of "location: message" problems.
"""

import logging
import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.core.errors import ErgoLabError, InputError
from src.core.settings import LabSettings
from src.phase_space import PhaseSpace, as_array
from src.systems import (
    BowenParams,
    BowenSurrogate,
    ShiftOnBlocks,
    SystemSpec,
    required_precision_bits,
    total_time,
)

logger = logging.getLogger(__name__)

GOLDEN_FRACTION = (math.sqrt(5.0) - 1.0) / 2.0


class ExperimentKind(str, Enum):
    ORBIT = "orbit"
    EMPIRICAL = "empirical"
    OSCILLATION = "oscillation"
    DELTA = "delta"
    META_GAP = "meta_gap"
    BIFURCATION_PROBE = "bifurcation_probe"
    BOWEN = "bowen"
    ANOSOV_KATOK = "anosov_katok"
    HK_SCAN = "hk_scan"


class ConfigValidationError(InputError):
    """A config failed validation; carries every problem found"""

    def __init__(self, problems: List[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class BifurcationBlock(BaseModel):
    """f_k = R_(1/k), n_k = max(1, floor(s * k)), target nu_s"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    s: float = Field(ge=0.0)
    ks: List[int] = Field(min_length=1)
    resolution: int = Field(default=2048, ge=1)

    @field_validator('ks')
    @classmethod
    def _positive(cls, v: List[int]) -> List[int]:
        if any(k < 1 for k in v):
            raise ValueError("every k must be at least 1")
        return v

    def horizon(self, k: int) -> int:
        return max(1, math.floor(self.s * k))


class AnosovKatokBlock(BaseModel):
    """Parameters of one construction stage and of its checks"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    r1: float = 0.1
    r2: float = 0.9
    theta: float = 0.05
    eps: float = 0.05
    sigma_area: float = 0.9
    p: int = Field(default=1, ge=0)
    q: int = Field(default=2, ge=1)
    alpha_prime: float = Field(default=GOLDEN_FRACTION, gt=0.0, lt=1.0)
    grid_n: int = Field(default=200, ge=100)
    iterations: int = Field(default=100_000, ge=1)
    x0: Tuple[float, float] = (0.5, 0.25)
    horizon: int = Field(default=1000, ge=1)
    boundary_resolution: int = Field(default=64, ge=1)
    boundary_mesh: float = Field(default=1.0 / 16, gt=0.0, le=1.0)

    @model_validator(mode='after')
    def _ranges(self) -> 'AnosovKatokBlock':
        if not 0.0 < self.r1 < self.r2 < 1.0:
            raise ValueError("r1, r2 must satisfy 0 < r1 < r2 < 1")
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0, 1)")
        if not 0.0 < self.eps < self.r1:
            raise ValueError("eps must satisfy 0 < eps < r1")
        if not 0.0 < self.sigma_area < 1.0:
            raise ValueError("sigma_area must lie in (0, 1)")
        if self.p >= self.q:
            raise ValueError(f"p = {self.p} must be below q = {self.q}")
        return self


# fields each kind needs before it can start
_REQUIRED: Dict[ExperimentKind, Tuple[str, ...]] = {
    ExperimentKind.ORBIT: ('system', 'n'),
    ExperimentKind.EMPIRICAL: ('system', 'n'),
    ExperimentKind.OSCILLATION: ('system', 'N', 'M'),
    ExperimentKind.DELTA: ('system', 'M'),
    ExperimentKind.META_GAP: ('system', 'n_list'),
    ExperimentKind.BIFURCATION_PROBE: ('bifurcation',),
    ExperimentKind.BOWEN: ('system', 'x0', 'passages'),
    ExperimentKind.ANOSOV_KATOK: ('anosov_katok',),
    ExperimentKind.HK_SCAN: ('lambda_grid', 'N', 'M'),
}

# kinds that iterate a discrete-time map
_DISCRETE_KINDS = {
    ExperimentKind.ORBIT,
    ExperimentKind.EMPIRICAL,
    ExperimentKind.DELTA,
    ExperimentKind.META_GAP,
}


class ExperimentConfig(BaseModel):
    """
    A single run: the experiment kind, the system(s) and every numerical
    parameter. Optional numerical fields fall back to the lab settings and the
    resolved values are written to the run summary.
    """
    model_config = ConfigDict(frozen=True, extra='forbid')

    kind: ExperimentKind
    seed: int = Field(ge=0)
    description: str = ""
    system: Optional[SystemSpec] = None
    perturbed: Optional[SystemSpec] = None
    x0: Optional[Union[float, List[float], str]] = None
    n: Optional[int] = Field(default=None, ge=1)
    N: Optional[int] = Field(default=None, ge=1)
    M: Optional[int] = Field(default=None, ge=1)
    N_list: Optional[List[int]] = None
    n_list: Optional[List[int]] = None
    passages: Optional[int] = Field(default=None, ge=2)
    window: Tuple[int, int] = (30, 60)
    schedule_ratio: Optional[float] = Field(default=None, gt=1.0)
    sample_size: Optional[int] = Field(default=None, ge=1)
    mesh: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    exact: bool = False
    d_threshold: Optional[float] = Field(default=None, ge=0.0)
    precision_bits: Optional[int] = Field(default=None, ge=1)
    lambda_grid: Optional[List[float]] = None
    bifurcation: Optional[BifurcationBlock] = None
    anosov_katok: Optional[AnosovKatokBlock] = None
    save_meta: bool = False
    output_dir: str = "runs"

    @field_validator('lambda_grid')
    @classmethod
    def _lambda_range(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None:
            if not v:
                raise ValueError("lambda_grid must be nonempty")
            for lam in v:
                if not 0.0 <= lam <= 4.0:
                    raise ValueError(f"lam = {lam} must lie in the range [0,4]")
        return v

    @field_validator('N_list', 'n_list')
    @classmethod
    def _horizon_list(cls, v: Optional[List[int]]) -> Optional[List[int]]:
        if v is not None:
            if not v or min(v) < 1:
                raise ValueError("horizon lists must hold positive integers")
            if any(b <= a for a, b in zip(v, v[1:])):
                raise ValueError("horizon lists must be strictly increasing")
        return v

    @model_validator(mode='after')
    def _consistent(self) -> 'ExperimentConfig':
        missing = [name for name in _REQUIRED[self.kind] if getattr(self, name) is None]
        if self.kind == ExperimentKind.DELTA and self.N is None and self.N_list is None:
            missing.append('N')
        if missing:
            raise ValueError(f"{self.kind.value} experiments need {', '.join(missing)}")

        if self.N is not None and self.M is not None and self.N > self.M:
            raise ValueError(f"N = {self.N} exceeds M = {self.M}")
        if self.N_list is not None and self.M is not None and self.N_list[-1] > self.M:
            raise ValueError(f"N_list entry {self.N_list[-1]} exceeds M = {self.M}")

        bowen = self.system is not None and isinstance(self.system.family, BowenSurrogate)
        if self.kind == ExperimentKind.BOWEN and not bowen:
            raise ValueError("bowen experiments need a bowen_surrogate system")
        if self.kind in _DISCRETE_KINDS and bowen:
            raise ValueError(f"{self.kind.value} experiments need a discrete-time system")
        if self.kind == ExperimentKind.OSCILLATION and bowen and (self.x0 is None or self.passages is None):
            raise ValueError("bowen_surrogate oscillation needs x0 (the offset u0) and passages")
        if self.perturbed is not None and self.system is not None \
                and self.perturbed.space != self.system.space:
            raise ValueError("perturbed system must live on the system's space")
        if self.kind == ExperimentKind.BOWEN:
            lo, hi = self.window
            if not 1 <= lo <= hi <= self.passages:
                raise ValueError(f"window {self.window} must satisfy 1 <= start <= end <= passages")
        return self

    # -- resolved values -------------------------------------------------------

    def ratio(self, settings: LabSettings) -> float:
        return self.schedule_ratio or settings.diagnostics.schedule_ratio

    def samples(self, settings: LabSettings) -> int:
        return self.sample_size or settings.diagnostics.sample_size

    def threshold(self, settings: LabSettings) -> float:
        return self.d_threshold if self.d_threshold is not None else settings.diagnostics.d_threshold

    def grid_mesh(self, settings: LabSettings, space: PhaseSpace) -> Optional[float]:
        """
        Mesh for the sample-averaged estimators. One-dimensional spaces default
        to the settings grid; other spaces coarsen only when mesh is given.
        None when exact solves are requested.
        """
        if self.exact:
            return None
        if self.mesh is not None or not space.is_one_dimensional:
            return self.mesh
        return settings.transport.mesh

    def bowen_params(self, settings: LabSettings) -> BowenParams:
        """Bowen parameters with box_h and transit_time defaulted from the settings"""
        params = self.system.family.params
        update = {}
        if 'box_h' not in params.model_fields_set:
            update['box_h'] = settings.bowen.box_h
        if 'transit_time' not in params.model_fields_set:
            update['transit_time'] = settings.bowen.transit_time
        return params.model_copy(update=update) if update else params


def parse_config(data: Dict[str, Any], settings: Optional[LabSettings] = None) -> ExperimentConfig:
    """
    Parse a config mapping.

    Raises:
        ConfigValidationError: with every structural problem
    """
    settings = settings or LabSettings()
    try:
        return ExperimentConfig.model_validate(
            data, context={'shift_depth': settings.phase_space.shift_depth}
        )
    except ValidationError as e:
        raise ConfigValidationError(_format_errors(e)) from e


def _format_errors(error: ValidationError) -> List[str]:
    problems = []
    for item in error.errors():
        location = '.'.join(str(part) for part in item['loc']) or 'config'
        problems.append(f"{location}: {item['msg']}")
    return problems


def _check_point(problems: List[str], spec: SystemSpec, x0: Any, field: str) -> None:
    if x0 is None:
        return
    if isinstance(spec.family, ShiftOnBlocks):
        return
    point = tuple(x0) if isinstance(x0, list) else x0
    try:
        as_array(spec.space, [point])
    except (ErgoLabError, ValueError, TypeError) as e:
        problems.append(f"{field}: {e}")


def preflight(config: ExperimentConfig, settings: LabSettings) -> List[str]:
    """Preconditions of the target operations that depend on resolved settings"""
    problems: List[str] = []
    spec = config.system

    if spec is not None and isinstance(spec.family, BowenSurrogate):
        params = config.bowen_params(settings)
        u0 = config.x0
        if not isinstance(u0, (int, float)) or not 0.0 < u0 < params.box_h:
            problems.append(f"x0: offset u0 = {u0} must lie in (0, box_h = {params.box_h})")
        elif config.kind == ExperimentKind.OSCILLATION:
            horizon = total_time(params, float(u0), config.passages)
            if config.M > horizon:
                problems.append(f"M: {config.M} exceeds the simulated time {horizon:.6g}")
    elif spec is not None:
        _check_point(problems, spec, config.x0, 'x0')
        if config.kind in (ExperimentKind.ORBIT, ExperimentKind.EMPIRICAL, ExperimentKind.OSCILLATION) \
                and config.x0 is None and not isinstance(spec.family, ShiftOnBlocks):
            problems.append(f"x0: {spec.label} needs an initial point")

    horizons = [v for v in (config.n, config.M) if v is not None]
    if config.n_list:
        horizons.append(config.n_list[-1] + 1)
    if spec is not None and config.precision_bits is not None and horizons:
        needed = required_precision_bits(spec, max(horizons))
        if config.precision_bits < needed:
            problems.append(
                f"precision_bits: {max(horizons)} iterations of {spec.label} need {needed} bits"
            )

    if config.kind in (ExperimentKind.META_GAP, ExperimentKind.BIFURCATION_PROBE):
        if config.samples(settings) > settings.transport.atom_cap:
            problems.append(
                f"sample_size: {config.samples(settings)} exceeds the atom cap "
                f"{settings.transport.atom_cap}"
            )
    return problems


def validate(data: Union[Dict[str, Any], ExperimentConfig],
             settings: Optional[LabSettings] = None) -> List[str]:
    """
    Every problem that would stop a run from starting; empty iff it would start.

    Args:
        data: Parsed JSON mapping, or an already parsed config
        settings: Lab settings used for defaults (built-in defaults if None)
    """
    settings = settings or LabSettings()
    if isinstance(data, ExperimentConfig):
        config = data
    else:
        try:
            config = parse_config(data, settings)
        except ConfigValidationError as e:
            return e.problems
    return preflight(config, settings)
