"""Empirical measures on Σ_k × [0,1]^m."""

from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from skewgraph.exceptions import ValidationError
from skewgraph.models.base import ONE, ZERO, to_fraction
from skewgraph.models.symbols import SymbolWindow


@dataclass(frozen=True, eq=False)
class Atom:
    window: SymbolWindow
    point: tuple[Fraction, ...]
    weight: Fraction


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Finitely many weighted atoms (θ, x); weights are positive and sum to 1."""

    atoms: tuple[Atom, ...]
    discarded_fraction: float = field(default=0.0)

    def __post_init__(self) -> None:
        atoms = tuple(self.atoms)
        if not atoms:
            raise ValidationError("A measure needs at least one atom", "atoms")
        dims = {len(a.point) for a in atoms}
        if len(dims) != 1:
            raise ValidationError("Atoms disagree on fiber dimension", "atoms")
        total = sum((a.weight for a in atoms), ZERO)
        if total != ONE:
            raise ValidationError(f"Weights sum to {float(total):.12g}, expected 1", "atoms")
        for a in atoms:
            if a.weight <= 0:
                raise ValidationError("Weights must be positive", "atoms")
            for c in a.point:
                if not ZERO <= c <= ONE:
                    raise ValidationError(f"Atom point {a.point} leaves the fiber", "atoms")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def uniform(
        cls, windows: Sequence[SymbolWindow], points: Sequence[Sequence]
    ) -> "EmpiricalMeasure":
        """Equal weights 1/n."""
        if len(windows) != len(points):
            raise ValidationError("Windows and points must have equal length", "atoms")
        weight = Fraction(1, len(windows)) if windows else ZERO
        return cls(
            tuple(
                Atom(w, tuple(to_fraction(c) for c in p), weight) for w, p in zip(windows, points)
            )
        )

    @classmethod
    def renormalized(
        cls,
        windows: Sequence[SymbolWindow],
        points: Sequence[Sequence],
        weights: Sequence,
        discarded_fraction: float = 0.0,
    ) -> "EmpiricalMeasure":
        weights = [to_fraction(w) for w in weights]
        total = sum(weights, ZERO)
        if total <= 0:
            raise ValidationError("Total weight must be positive", "atoms")
        return cls(
            tuple(
                Atom(w, tuple(to_fraction(c) for c in p), wt / total)
                for w, p, wt in zip(windows, points, weights)
            ),
            discarded_fraction,
        )

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def dimension(self) -> int:
        return len(self.atoms[0].point)

    @property
    def alphabet_size(self) -> int:
        return self.atoms[0].window.alphabet_size

    def windows(self) -> list[SymbolWindow]:
        return [a.window for a in self.atoms]

    def points_array(self) -> np.ndarray:
        return np.array([[float(c) for c in a.point] for a in self.atoms])

    def weights_array(self) -> np.ndarray:
        return np.array([float(a.weight) for a in self.atoms])

    def base_multiset(self, depth: int) -> Counter:
        """Multiset of base symbols on [-depth, depth), weighted."""
        counts: Counter = Counter()
        for a in self.atoms:
            counts[a.window.symbols(-depth, depth)] += a.weight
        return counts


class FiberLawKind(str, Enum):
    UNIFORM = "uniform"
    DIRAC = "dirac"
    GRID = "grid"


@dataclass(frozen=True)
class FiberLaw:
    """Law of the fiber coordinate of sampled atoms."""

    kind: FiberLawKind
    point: tuple[Fraction, ...] | None = None
    grid_size: int | None = None

    @classmethod
    def uniform(cls) -> "FiberLaw":
        return cls(FiberLawKind.UNIFORM)

    @classmethod
    def dirac(cls, point) -> "FiberLaw":
        coords = tuple(point) if isinstance(point, (tuple, list)) else (point,)
        return cls(FiberLawKind.DIRAC, point=tuple(to_fraction(c) for c in coords))

    @classmethod
    def grid(cls, size: int) -> "FiberLaw":
        if size < 1:
            raise ValidationError("Grid size must be positive", "grid_size")
        return cls(FiberLawKind.GRID, grid_size=size)
