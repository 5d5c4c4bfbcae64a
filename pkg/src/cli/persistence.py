# cli/persistence.py

"""
Meta-measure persistence: a JSON index plus one CSV per atom measure.

    <directory>/index.json
    <directory>/atom_0000.csv
    <directory>/atom_0001.csv
    ...
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List

from src.core.errors import InputError
from src.phase_space import PhaseSpace
from src.transport import EmpiricalMeasure, MetaMeasure, fmt

logger = logging.getLogger(__name__)

INDEX_NAME = "index.json"
INDEX_VERSION = 1


def _atom_name(index: int) -> str:
    return f"atom_{index:04d}.csv"


def save_meta_measure(meta: MetaMeasure, directory: Path) -> List[str]:
    """
    Write meta into directory.

    Returns:
        Written file names relative to directory, index first
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries: List[Dict[str, Any]] = []
    names = [INDEX_NAME]
    for i, (measure, weight) in enumerate(zip(meta.atoms, meta.weights)):
        name = _atom_name(i)
        measure.to_csv(directory / name)
        entries.append({'file': name, 'weight': fmt(weight), 'n_source': measure.n_source})
        names.append(name)

    index = {
        'version': INDEX_VERSION,
        'space': meta.space.to_descriptor(),
        'atoms': entries,
    }
    with open(directory / INDEX_NAME, 'w') as f:
        json.dump(index, f, indent=2)
    logger.debug(f"Saved meta-measure with {meta.size} atoms to {directory}")
    return names


def load_meta_measure(directory: Path) -> MetaMeasure:
    """
    Read a meta-measure written by save_meta_measure.

    Raises:
        InputError: missing index or unsupported index version
    """
    directory = Path(directory)
    path = directory / INDEX_NAME
    if not path.exists():
        raise InputError(f"no meta-measure index at {path}")
    with open(path, 'r') as f:
        index = json.load(f)
    if index.get('version') != INDEX_VERSION:
        raise InputError(f"unsupported meta-measure index version {index.get('version')}")

    space = PhaseSpace.from_descriptor(index['space'])
    atoms = [EmpiricalMeasure.from_csv(directory / entry['file'], space, int(entry['n_source']))
             for entry in index['atoms']]
    weights = [float(entry['weight']) for entry in index['atoms']]
    return MetaMeasure(tuple(atoms), weights)
