"""Records describing the concrete systems shipped with skewgraph."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from skewgraph.models.maps import PLMap
from skewgraph.models.sets import FiberSet, IntervalUnion
from skewgraph.models.system import SkewSystem

Word = tuple[int, ...]


@dataclass(frozen=True)
class KPairSpec:
    """Two increasing maps forming a K-pair on J = [a, b].

    f1 attracts to a, f2 attracts to b, the composition along `repelling_word` has a repelling
    fixed point inside J, and the contracting words cover J.
    """

    interval: tuple[Fraction, Fraction]
    f1: PLMap
    f2: PLMap
    contracting_words: tuple[Word, ...]
    repelling_word: Word

    @property
    def maps(self) -> tuple[PLMap, PLMap]:
        return (self.f1, self.f2)


@dataclass(frozen=True, eq=False)
class ZooEntry:
    """A built system with the facts its experiments rely on."""

    system: SkewSystem
    description: str
    parameters: dict[str, Any] = field(default_factory=dict)
    trapping_region: FiberSet | None = None
    intervals: IntervalUnion | None = None
    splitting_words: tuple[Word, Word] | None = None
    kpair: KPairSpec | None = None
    adversarial_tail: Word | None = None

    @property
    def name(self) -> str:
        return self.system.name

    def to_dict(self) -> dict:
        data: dict[str, Any] = {
            "name": self.name,
            "description": self.description,
            "parameters": dict(self.parameters),
            "system": self.system.to_dict(),
        }
        if self.intervals is not None:
            data["intervals"] = self.intervals.to_rows()
        if self.splitting_words is not None:
            data["splitting_words"] = [list(w) for w in self.splitting_words]
        if self.adversarial_tail is not None:
            data["adversarial_tail"] = list(self.adversarial_tail)
        return data


@dataclass(frozen=True, eq=False)
class PerturbationReport:
    """Outcome of re-validating one jittered copy of a zoo system."""

    seed: int
    delta: float
    valid: bool
    findings: tuple[str, ...] = ()
    entry: ZooEntry | None = None
    cover_gap: float | None = None
