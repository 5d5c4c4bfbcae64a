# transport/measures.py

"""
Finitely supported measures, measures of measures, and transport plans.

Locations are held in the phase-space internal layout (see phase_space.spaces)
and kept sorted, with coincident atoms merged on exact equality.
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from src.core.errors import InputError, InvariantViolation
from src.phase_space import PhaseSpace, Point, SpaceKind, as_array, to_points

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-12


def fmt(value: float) -> str:
    """17 significant digits, round-trip exact for doubles"""
    return format(float(value), '.17g')


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


def _merge(space: PhaseSpace, locations: np.ndarray, weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if space.kind == SpaceKind.ANNULUS:
        unique, inverse = np.unique(locations.reshape(-1, 2), axis=0, return_inverse=True)
    else:
        unique, inverse = np.unique(locations, return_inverse=True)
    merged = np.bincount(inverse.ravel(), weights=weights, minlength=len(unique))
    return unique, merged


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Finitely supported probability measure on a phase space"""
    space: PhaseSpace
    locations: np.ndarray
    weights: np.ndarray
    n_source: int = 0

    def __post_init__(self):
        if len(self.locations) != len(self.weights) or len(self.weights) == 0:
            raise InputError("a measure needs one weight per atom and at least one atom")
        if np.any(self.weights <= 0.0):
            raise InputError("atom weights must be positive")
        total = float(self.weights.sum())
        if abs(total - 1.0) > WEIGHT_TOLERANCE * max(1, len(self.weights)) ** 0.5 + WEIGHT_TOLERANCE:
            raise InputError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, 'locations', _freeze(self.locations))
        object.__setattr__(self, 'weights', _freeze(np.asarray(self.weights, dtype=float)))

    @classmethod
    def from_orbit(cls, space: PhaseSpace, points: np.ndarray) -> 'EmpiricalMeasure':
        """Uniform measure on internal-layout orbit points, atoms merged"""
        n = len(points)
        if n == 0:
            raise InputError("an empirical measure needs at least one point")
        if space.kind == SpaceKind.ANNULUS:
            unique, counts = np.unique(np.asarray(points).reshape(-1, 2), axis=0, return_counts=True)
        else:
            unique, counts = np.unique(points, return_counts=True)
        return cls(space, unique, counts / n, n_source=n)

    @classmethod
    def from_counts(cls, space: PhaseSpace, locations: np.ndarray, counts: np.ndarray,
                    n: int) -> 'EmpiricalMeasure':
        """Measure with weights counts / n; locations must already be sorted and distinct"""
        return cls(space, np.asarray(locations), np.asarray(counts) / n, n_source=n)

    @classmethod
    def from_atoms(cls, space: PhaseSpace, locations: Any, weights: Sequence[float],
                   n_source: int = 0, internal: bool = False) -> 'EmpiricalMeasure':
        """
        Measure from explicit atoms.

        Args:
            space: Phase space
            locations: Public points, or an internal array when internal is True
            weights: Atom weights summing to 1
            n_source: Number of orbit points behind the measure (0 if synthetic)
            internal: Whether locations use the internal layout
        """
        arr = np.asarray(locations) if internal else as_array(space, list(locations))
        w = np.asarray(weights, dtype=float)
        if len(arr) != len(w):
            raise InputError("one weight per location required")
        unique, merged = _merge(space, arr, w)
        return cls(space, unique, merged, n_source=n_source)

    @classmethod
    def dirac(cls, space: PhaseSpace, point: Point) -> 'EmpiricalMeasure':
        return cls(space, as_array(space, [point]), np.ones(1), n_source=0)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def atoms(self) -> List[Tuple[Point, float]]:
        return list(zip(to_points(self.space, self.locations), (float(w) for w in self.weights)))

    def same_as(self, other: 'EmpiricalMeasure') -> bool:
        """Exact equality of support and weights"""
        return (self.space == other.space
                and self.locations.shape == other.locations.shape
                and bool(np.array_equal(self.locations, other.locations))
                and bool(np.array_equal(self.weights, other.weights)))

    # -- serialization ------------------------------------------------------

    def csv_header(self) -> List[str]:
        if self.space.kind == SpaceKind.ANNULUS:
            return ['r', 'theta', 'weight']
        if self.space.kind == SpaceKind.BINARY_SHIFT:
            return ['word', 'weight']
        return ['x', 'weight']

    def csv_rows(self) -> List[List[str]]:
        rows = []
        for point, weight in self.atoms:
            if isinstance(point, tuple):
                rows.append([fmt(point[0]), fmt(point[1]), fmt(weight)])
            elif isinstance(point, str):
                rows.append([point, fmt(weight)])
            else:
                rows.append([fmt(point), fmt(weight)])
        return rows

    def to_csv(self, path: Path) -> None:
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(self.csv_header())
            writer.writerows(self.csv_rows())

    @classmethod
    def from_csv(cls, path: Path, space: PhaseSpace, n_source: int = 0) -> 'EmpiricalMeasure':
        with open(path, 'r', newline='') as f:
            reader = csv.reader(f)
            next(reader)
            rows = list(reader)
        if space.kind == SpaceKind.ANNULUS:
            points: List[Point] = [(float(r[0]), float(r[1])) for r in rows]
        elif space.kind == SpaceKind.BINARY_SHIFT:
            points = [r[0] for r in rows]
        else:
            points = [float(r[0]) for r in rows]
        return cls.from_atoms(space, points, [float(r[-1]) for r in rows], n_source=n_source)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'space': self.space.to_descriptor(),
            'n_source': self.n_source,
            'atoms': [[p, w] for p, w in self.atoms],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EmpiricalMeasure':
        space = PhaseSpace.from_descriptor(data['space'])
        points = [tuple(p) if isinstance(p, list) else p for p, _ in data['atoms']]
        return cls.from_atoms(space, points, [w for _, w in data['atoms']],
                              n_source=int(data.get('n_source', 0)))

    @classmethod
    def from_json(cls, text: str) -> 'EmpiricalMeasure':
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class MetaMeasure:
    """Finitely supported probability measure whose atoms are EmpiricalMeasures"""
    atoms: Tuple[EmpiricalMeasure, ...]
    weights: np.ndarray

    def __post_init__(self):
        if not self.atoms or len(self.atoms) != len(self.weights):
            raise InputError("a meta-measure needs one weight per atom and at least one atom")
        space = self.atoms[0].space
        if any(m.space != space for m in self.atoms):
            raise InputError("all atom measures must share one space")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w <= 0.0) or abs(float(w.sum()) - 1.0) > 1e-12:
            raise InputError("meta-measure weights must be positive and sum to 1")
        object.__setattr__(self, 'atoms', tuple(self.atoms))
        object.__setattr__(self, 'weights', _freeze(w))

    @classmethod
    def uniform(cls, atoms: Sequence[EmpiricalMeasure]) -> 'MetaMeasure':
        return cls(tuple(atoms), np.full(len(atoms), 1.0 / len(atoms)))

    @classmethod
    def dirac(cls, measure: EmpiricalMeasure) -> 'MetaMeasure':
        return cls((measure,), np.ones(1))

    @property
    def space(self) -> PhaseSpace:
        return self.atoms[0].space

    @property
    def size(self) -> int:
        return len(self.atoms)


@dataclass
class TransportPlan:
    """Coupling realizing a discrete transport solution"""
    row_marginal: np.ndarray
    column_marginal: np.ndarray
    coupling: np.ndarray
    objective: float
    details: Dict[str, Any] = field(default_factory=dict)

    def certify(self, cost: np.ndarray, tolerance: float = 1e-10) -> None:
        """
        Re-verify marginals, nonnegativity and objective.

        Raises:
            InvariantViolation: with the offending quantity in its record
        """
        rows = np.abs(self.coupling.sum(axis=1) - self.row_marginal).max()
        cols = np.abs(self.coupling.sum(axis=0) - self.column_marginal).max()
        negative = float(self.coupling.min()) if self.coupling.size else 0.0
        objective = float(np.sum(self.coupling * cost))
        record = {
            'row_error': float(rows),
            'column_error': float(cols),
            'min_coupling': negative,
            'objective_error': abs(objective - self.objective),
        }
        if rows > tolerance or cols > tolerance or negative < -tolerance \
                or abs(objective - self.objective) > tolerance:
            raise InvariantViolation("transport plan failed certification", record)

    def triples(self) -> List[Tuple[int, int, float]]:
        """Nonzero entries as (i, j, mass)"""
        i, j = np.nonzero(self.coupling)
        return [(int(a), int(b), float(self.coupling[a, b])) for a, b in zip(i, j)]

    def to_csv(self, path: Path) -> None:
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(['i', 'j', 'mass'])
            for i, j, mass in self.triples():
                writer.writerow([i, j, fmt(mass)])
