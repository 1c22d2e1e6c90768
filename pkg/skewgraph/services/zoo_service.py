"""Preset registry over the zoo builders."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from skewgraph.config import Settings, get_settings
from skewgraph.exceptions import ValidationError
from skewgraph.models.maps import PLMap
from skewgraph.models.zoo import PerturbationReport, ZooEntry
from skewgraph.services.zoo import (
    build_binary_ifs,
    build_contraction_cover,
    build_identity,
    build_kpair_system,
    build_middle_third,
    build_msplits,
    build_porcupine,
    build_single_contraction,
    build_spine_family,
    build_theorem2_family,
    perturbation_harness,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Preset:
    """A named builder with its default parameters."""

    name: str
    builder: Callable[..., ZooEntry]
    description: str
    defaults: dict[str, Any] = field(default_factory=dict)


def _cover(extra_maps: list | None = None) -> ZooEntry:
    if extra_maps is None:
        return build_contraction_cover()
    maps = [
        f if isinstance(f, PLMap) else PLMap.from_strings(f["x"], f["y"]) for f in extra_maps
    ]
    return build_contraction_cover(maps)


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in (
        Preset("binary_ifs", build_binary_ifs, "f1 = x/2, f2 = x/2 + 1/2, fair coin"),
        Preset("middle_third", build_middle_third, "x/3 and x/3 + 2/3, fair coin"),
        Preset(
            "single_contraction",
            build_single_contraction,
            "Two copies of x -> c x",
            {"c": "1/2", "m": 1},
        ),
        Preset("identity", build_identity, "Two identity maps", {"m": 1}),
        Preset(
            "contraction_cover",
            _cover,
            "Binary IFS plus extra monotone maps",
            {"extra_maps": None},
        ),
        Preset(
            "msplits",
            build_msplits,
            "Two maps with the splitting property over a two-state Markov chain",
            {"m": 1, "p11": 0.5, "p21": 0.5},
        ),
        Preset("kpair", build_kpair_system, "K-pair on [0,1] over the fair coin"),
        Preset(
            "spine_family",
            build_spine_family,
            "Four maps with m-component spines over (12)-periodic pasts",
            {"m": 2},
        ),
        Preset(
            "theorem2",
            build_theorem2_family,
            "Alias of spine_family",
            {"m": 2},
        ),
        Preset("porcupine", build_porcupine, "Orientation-preserving porcupine-like pair"),
    )
}


class ZooService:
    """Builds preset systems by name and runs robustness checks on them."""

    def __init__(self, settings: Settings | None = None):
        self.settings = settings or get_settings()

    @staticmethod
    def list_presets() -> list[Preset]:
        return list(PRESETS.values())

    @staticmethod
    def get_preset(name: str) -> Preset:
        """
        Look up a preset.

        Raises:
            ValidationError: If no preset has this name
        """
        try:
            return PRESETS[name]
        except KeyError:
            raise ValidationError(
                f"Unknown preset '{name}'; available: {', '.join(sorted(PRESETS))}", "preset"
            ) from None

    def build(self, name: str, **overrides: Any) -> ZooEntry:
        """
        Build a preset, overriding any of its default parameters.

        Raises:
            ValidationError: If the preset is unknown, an override is not a parameter of the
                preset, or the builder rejects the parameters
        """
        preset = self.get_preset(name)
        unknown = set(overrides) - set(preset.defaults)
        if unknown:
            raise ValidationError(
                f"Preset '{name}' has no parameter(s) {', '.join(sorted(unknown))}", "overrides"
            )
        params = {**preset.defaults, **overrides}
        entry = preset.builder(**params)
        system = entry.system
        logger.info(f"Built preset {name} with k={system.k}, m={system.fiber_dimension}")
        return entry

    def perturbation_reports(
        self, entry: ZooEntry, delta: float | None = None, seeds=(0, 1, 2, 3, 4)
    ) -> list[PerturbationReport]:
        delta = delta if delta is not None else self.settings.perturbation_delta
        return perturbation_harness(entry, delta, seeds, self.settings.worker_count())
