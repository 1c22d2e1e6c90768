"""Concrete systems: builders, structural validators and the perturbation harness."""

from skewgraph.services.zoo.builders import (
    build_binary_ifs,
    build_contraction_cover,
    build_identity,
    build_kpair,
    build_kpair_system,
    build_middle_third,
    build_msplits,
    build_porcupine,
    build_single_contraction,
    build_spine_family,
    build_theorem2_family,
    family_spine_components,
    transported_kpair,
)
from skewgraph.services.zoo.perturbation import check_entry, perturb, perturbation_harness
from skewgraph.services.zoo.validation import (
    KPairValidator,
    SpineFamilyValidator,
    compose_word,
    lipschitz_on,
)

__all__ = [
    "KPairValidator",
    "SpineFamilyValidator",
    "build_binary_ifs",
    "build_contraction_cover",
    "build_identity",
    "build_kpair",
    "build_kpair_system",
    "build_middle_third",
    "build_msplits",
    "build_porcupine",
    "build_single_contraction",
    "build_spine_family",
    "build_theorem2_family",
    "check_entry",
    "compose_word",
    "family_spine_components",
    "lipschitz_on",
    "perturb",
    "perturbation_harness",
    "transported_kpair",
]
