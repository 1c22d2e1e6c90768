"""Symbolic dynamics helpers: Markov measures, random streams and window operations."""

from skewgraph.services.symbolic.markov import (
    MarkovValidator,
    cylinder_measure,
    first_inadmissible_position,
    is_admissible,
    sample_markov,
    sample_markov_batch,
    stationary_vector,
)
from skewgraph.services.symbolic.rng import make_rng, stream_id
from skewgraph.services.symbolic.sequences import (
    canonical_distance,
    disjunctive_prefix,
    disjunctive_window,
    sample_window,
    sample_windows,
    shift,
    symbol_at,
)

__all__ = [
    "MarkovValidator",
    "canonical_distance",
    "cylinder_measure",
    "disjunctive_prefix",
    "disjunctive_window",
    "first_inadmissible_position",
    "is_admissible",
    "make_rng",
    "sample_markov",
    "sample_markov_batch",
    "sample_window",
    "sample_windows",
    "shift",
    "stationary_vector",
    "stream_id",
    "symbol_at",
]
