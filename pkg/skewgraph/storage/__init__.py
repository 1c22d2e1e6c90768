"""Persistence of experiment outputs and empirical measures."""

from skewgraph.storage.artifacts import (
    DATA_FILE,
    PLOT_FILE,
    RESULTS_FILE,
    ArtifactStore,
    StagedArtifacts,
)
from skewgraph.storage.measure_io import format_measure, parse_measure, read_measure, write_measure

__all__ = [
    "ArtifactStore",
    "DATA_FILE",
    "PLOT_FILE",
    "RESULTS_FILE",
    "StagedArtifacts",
    "format_measure",
    "parse_measure",
    "read_measure",
    "write_measure",
]
