# cli/__init__.py

from .experiments import (
    AnosovKatokBlock,
    BifurcationBlock,
    ConfigValidationError,
    ExperimentConfig,
    ExperimentKind,
    parse_config,
    preflight,
    validate,
)
from .persistence import load_meta_measure, save_meta_measure
from .runner import (
    EXIT_ERROR,
    EXIT_INVALID,
    EXIT_INVARIANT,
    EXIT_OK,
    EXPERIMENTS,
    RunContext,
    RunManifest,
    execute,
    run,
)
from .oracles import ORACLES

__all__ = [
    # Configuration
    'ExperimentKind',
    'ExperimentConfig',
    'BifurcationBlock',
    'AnosovKatokBlock',
    'ConfigValidationError',
    'parse_config',
    'preflight',
    'validate',
    # Runs
    'EXPERIMENTS',
    'RunContext',
    'RunManifest',
    'run',
    'execute',
    'EXIT_OK',
    'EXIT_ERROR',
    'EXIT_INVALID',
    'EXIT_INVARIANT',
    # Persistence
    'save_meta_measure',
    'load_meta_measure',
    # Oracles
    'ORACLES',
]
