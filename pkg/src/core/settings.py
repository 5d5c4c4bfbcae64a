# core/settings.py

"""
Lab settings loaded from configs/ergolab.yaml.

Settings are defaults for the runner and the estimators; every value that
influences a numerical result is also recorded in the run manifest.
"""

import logging
from pathlib import Path
from typing import Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.core.errors import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent.parent / 'configs' / 'ergolab.yaml'


class LoggingSettings(BaseModel):
    """Logging block applied by the entry point"""
    model_config = ConfigDict(frozen=True)

    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file: Optional[str] = None


class EntropicSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(default=1e-2, gt=0.0)
    max_iters: int = Field(default=10000, ge=1)


class TransportSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    atom_cap: int = Field(default=512, ge=1)
    mesh: float = Field(default=1.0 / 4096, gt=0.0, le=1.0)
    entropic: EntropicSettings = Field(default_factory=EntropicSettings)
    certify_tolerance: float = Field(default=1e-10, gt=0.0)


class DiagnosticsSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    schedule_ratio: float = Field(default=1.2, gt=1.0)
    d_threshold: float = Field(default=0.05, ge=0.0)
    sample_size: int = Field(default=200, ge=1)


class PhaseSpaceSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    shift_depth: int = Field(default=20, ge=1, le=52)


class BowenSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    box_h: float = Field(default=1.0, gt=0.0)
    transit_time: float = Field(default=1.0, ge=0.0)


class LabSettings(BaseModel):
    """Typed view of configs/ergolab.yaml"""
    model_config = ConfigDict(frozen=True)

    environment: str = "default"
    artifact_version: str = "1.0.0"
    logging: LoggingSettings = Field(default_factory=LoggingSettings)
    workers: int = Field(default=1, ge=1)
    transport: TransportSettings = Field(default_factory=TransportSettings)
    diagnostics: DiagnosticsSettings = Field(default_factory=DiagnosticsSettings)
    phase_space: PhaseSpaceSettings = Field(default_factory=PhaseSpaceSettings)
    bowen: BowenSettings = Field(default_factory=BowenSettings)


def load_settings(config_path: Optional[Path] = None) -> LabSettings:
    """
    Load lab settings from a YAML file.

    Args:
        config_path: Path to the YAML file (defaults to configs/ergolab.yaml)

    Returns:
        Parsed settings; built-in defaults when the default file is absent
    """
    path = Path(config_path) if config_path is not None else DEFAULT_CONFIG_PATH
    if not path.exists():
        if config_path is not None:
            raise ConfigurationError(f"settings file not found: {path}")
        logger.warning(f"Settings file {path} missing, using built-in defaults")
        return LabSettings()

    logger.debug(f"Loading settings from: {path}")
    with open(path, 'r') as f:
        raw = yaml.safe_load(f) or {}

    try:
        return LabSettings.model_validate(raw)
    except ValidationError as e:
        raise ConfigurationError(f"invalid settings in {path}: {e}") from e
