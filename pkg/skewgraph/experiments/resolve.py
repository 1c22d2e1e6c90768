"""Turn configuration sections into domain values: systems, base points and fiber laws."""

from dataclasses import replace

from skewgraph.exceptions import ValidationError
from skewgraph.experiments.schema import (
    BaseMeasureConfig,
    ExperimentConfig,
    MapConfig,
    ParametersConfig,
    WindowConfig,
)
from skewgraph.models.base import to_fraction
from skewgraph.models.maps import FiberMap, PLMap, ProductMap
from skewgraph.models.measure import FiberLaw
from skewgraph.models.symbols import MarkovSpec, SymbolWindow
from skewgraph.models.system import SkewSystem
from skewgraph.models.zoo import ZooEntry
from skewgraph.services.symbolic import disjunctive_window, sample_window
from skewgraph.services.zoo_service import ZooService


def _build_map(config: MapConfig, index: int) -> FiberMap:
    if config.factors is not None:
        return ProductMap(tuple(_build_map(f, index) for f in config.factors))
    if config.x is None or config.y is None:
        raise ValidationError(f"Map {index} needs x and y arrays or factors", "system.maps")
    return PLMap.from_strings([str(v) for v in config.x], [str(v) for v in config.y])


def build_markov(config: BaseMeasureConfig) -> MarkovSpec:
    """
    Build the base measure; the stationary vector is solved for when not given.

    Raises:
        ValidationError: If the matrix is not stochastic or the vector not invariant
    """
    try:
        matrix = [[float(to_fraction(v)) for v in row] for row in config.transition]
        stationary = (
            [float(to_fraction(v)) for v in config.stationary]
            if config.stationary is not None
            else None
        )
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"Cannot parse base measure: {e}", "base") from e
    return MarkovSpec(matrix, stationary)


def resolve_system(config: ExperimentConfig, zoo: ZooService | None = None) -> ZooEntry:
    """
    The zoo entry described by the configuration.

    Inline maps get a uniform Bernoulli base unless a transition matrix is given; a given
    matrix replaces the preset's base measure.

    Raises:
        ValidationError: If the preset, its overrides, the maps or the matrix are invalid
    """
    section = config.system
    if section.preset is not None:
        entry = (zoo or ZooService()).build(section.preset, **section.overrides)
    elif section.maps:
        maps = tuple(_build_map(m, i) for i, m in enumerate(section.maps, start=1))
        system = SkewSystem(maps, MarkovSpec.uniform(len(maps)), name=section.name)
        entry = ZooEntry(system, "Inline system")
    else:
        raise ValidationError("Give a preset or inline maps", "system")
    if config.base is not None:
        entry = replace(entry, system=entry.system.with_markov(build_markov(config.base)))
    return entry


def build_window(
    config: WindowConfig, system: SkewSystem, seed: int, forward: int, word_length: int
) -> SymbolWindow:
    """
    The base point θ described by a window section.

    Args:
        config: Window section
        system: The skew product (alphabet and base measure)
        seed: Experiment seed for sampled parts
        forward: Number of forward symbols the experiment will read
        word_length: Half-length of sampled windows
    """
    k = system.k
    if config.disjunctive is not None:
        return disjunctive_window(
            k, config.disjunctive, system.markov, forward, seed, past_length=word_length
        )
    if config.tail is None:
        return sample_window(system.markov, word_length, seed)
    return SymbolWindow.from_past(
        k, config.past, config.tail, config.future, config.future_tail
    )


def fiber_law(params: ParametersConfig, dimension: int) -> FiberLaw:
    if params.fiber_law == "grid":
        return FiberLaw.grid(params.grid_size)
    if params.fiber_law == "dirac":
        return FiberLaw.dirac(fiber_point(params, dimension))
    return FiberLaw.uniform()


def fiber_point(params: ParametersConfig, dimension: int) -> tuple:
    """The configured fiber point x, defaulting to the center of M."""
    x = params.x
    if x is None:
        return tuple(to_fraction("1/2") for _ in range(dimension))
    coords = x if isinstance(x, list) else [x] * dimension
    if len(coords) != dimension:
        raise ValidationError(
            f"Point has {len(coords)} coordinates, fiber has {dimension}", "parameters.x"
        )
    try:
        return tuple(to_fraction(c) for c in coords)
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"Cannot parse point: {e}", "parameters.x") from e
