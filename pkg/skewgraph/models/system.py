"""The step skew product F(θ, x) = (σθ, f_{θ_0}(x))."""

from dataclasses import dataclass, field
from typing import Any

from skewgraph.exceptions import ValidationError
from skewgraph.models.maps import FiberMap, PLMap, ProductMap
from skewgraph.models.sets import FiberSet, full_space
from skewgraph.models.symbols import MarkovSpec


@dataclass(frozen=True, eq=False)
class SkewSystem:
    """k fiber maps over a Markov shift on k symbols."""

    fiber_maps: tuple[FiberMap, ...]
    markov: MarkovSpec
    name: str = "custom"
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        maps = tuple(self.fiber_maps)
        if len(maps) < 2:
            raise ValidationError("A skew product needs at least two fiber maps", "fiber_maps")
        for f in maps:
            if not isinstance(f, (PLMap, ProductMap)):
                raise ValidationError(
                    f"Unsupported fiber map type {type(f).__name__}", "fiber_maps"
                )
        dimensions = {f.dimension for f in maps}
        if len(dimensions) != 1:
            raise ValidationError(
                f"Fiber maps disagree on dimension: {sorted(dimensions)}", "fiber_maps"
            )
        if self.markov.alphabet_size != len(maps):
            raise ValidationError(
                f"Base measure has {self.markov.alphabet_size} symbols but there are "
                f"{len(maps)} fiber maps",
                "markov",
            )
        object.__setattr__(self, "fiber_maps", maps)

    @property
    def k(self) -> int:
        return len(self.fiber_maps)

    @property
    def fiber_dimension(self) -> int:
        return self.fiber_maps[0].dimension

    def fiber_map(self, symbol: int) -> FiberMap:
        """f_symbol with 1-based symbols."""
        if not 1 <= symbol <= self.k:
            raise ValidationError(f"Symbol {symbol} is outside the alphabet 1..{self.k}", "symbol")
        return self.fiber_maps[symbol - 1]

    def full_space(self) -> FiberSet:
        """The fiber M = [0,1]^m."""
        return full_space(self.fiber_dimension)

    def strictly_increasing(self) -> bool:
        return all(f.strictly_increasing for f in self.fiber_maps)

    def with_maps(self, fiber_maps: tuple[FiberMap, ...]) -> "SkewSystem":
        return SkewSystem(fiber_maps, self.markov, self.name, dict(self.metadata))

    def with_markov(self, markov: MarkovSpec) -> "SkewSystem":
        return SkewSystem(self.fiber_maps, markov, self.name, dict(self.metadata))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "fiber_dimension": self.fiber_dimension,
            "fiber_maps": [f.to_dict() for f in self.fiber_maps],
            "markov": self.markov.to_dict(),
        }
