"""Config-driven experiments: schema, validation, runners and plots."""

from skewgraph.experiments.plot import PlotSpec, Series, render_svg
from skewgraph.experiments.resolve import build_markov, build_window, resolve_system
from skewgraph.experiments.runners import ExperimentOutput, ExperimentRunner, RunRecord
from skewgraph.experiments.schema import (
    ExperimentConfig,
    ExperimentKind,
    config_digest,
    load_config_data,
    parse_config,
)
from skewgraph.experiments.validation import ConfigValidator, validate

__all__ = [
    "ConfigValidator",
    "ExperimentConfig",
    "ExperimentKind",
    "ExperimentOutput",
    "ExperimentRunner",
    "PlotSpec",
    "RunRecord",
    "Series",
    "build_markov",
    "build_window",
    "config_digest",
    "load_config_data",
    "parse_config",
    "render_svg",
    "resolve_system",
    "validate",
]
