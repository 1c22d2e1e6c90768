"""Dry-run validation of experiment configurations."""

import logging
from typing import Any

from skewgraph.exceptions import SkewGraphError
from skewgraph.experiments.resolve import resolve_system
from skewgraph.experiments.schema import (
    BaseMeasureConfig,
    ExperimentConfig,
    ExperimentKind,
    parse_config,
)
from skewgraph.models.base import to_fraction
from skewgraph.models.zoo import ZooEntry
from skewgraph.services.symbolic import first_inadmissible_position

logger = logging.getLogger(__name__)

ROW_SUM_TOL = 1e-12
REFERENCES = ("fresh", "paired")
FIBER_LAWS = ("uniform", "grid", "dirac")
SPINE_BASES = ("target", "full")


class ConfigValidator:
    """Collects findings about a configuration instead of raising on the first one."""

    @staticmethod
    def matrix_findings(base: BaseMeasureConfig) -> list[str]:
        """Shape, sign and row-sum problems of the transition matrix, one finding per row."""
        rows = base.transition
        try:
            matrix = [[float(to_fraction(v)) for v in row] for row in rows]
        except (ValueError, ZeroDivisionError) as e:
            return [f"base.transition: cannot parse entry ({e})"]
        findings: list[str] = []
        for i, row in enumerate(matrix, start=1):
            if len(row) != len(rows):
                findings.append(
                    f"base.transition: row {i} has {len(row)} entries, expected {len(rows)}"
                )
                continue
            if any(v < 0 for v in row):
                findings.append(f"base.transition: row {i} has a negative entry")
            total = sum(row)
            if abs(total - 1.0) > ROW_SUM_TOL:
                findings.append(f"base.transition: row {i} sums to {total:.12g}, expected 1")
        return findings

    @staticmethod
    def symbol_findings(name: str, symbols: list[int], k: int) -> list[str]:
        bad = [s for s in symbols if not 1 <= s <= k]
        return [f"{name}: symbols {bad} are outside the alphabet 1..{k}"] if bad else []

    @staticmethod
    def split_word_findings(config: ExperimentConfig, entry: ZooEntry) -> list[str]:
        """Splitting words must be two admissible words over the alphabet."""
        words = config.parameters.words
        if words is None:
            words = [list(w) for w in entry.splitting_words] if entry.splitting_words else None
        if words is None or len(words) != 2:
            return ["parameters.words: split-check needs exactly two words"]
        findings: list[str] = []
        markov = entry.system.markov
        for label, word in zip(("a", "b"), words):
            bad = ConfigValidator.symbol_findings(f"parameters.words.{label}", word, entry.system.k)
            if bad or not word:
                findings += bad or [f"parameters.words.{label}: word is empty"]
                continue
            position = first_inadmissible_position(word, markov)
            if position is not None:
                pair = tuple(word[position : position + 2])
                findings.append(
                    f"parameters.words.{label}: word {tuple(word)} is not admissible, "
                    f"transition {pair} at position {position} has probability zero"
                )
        return findings

    @staticmethod
    def parameter_findings(config: ExperimentConfig, entry: ZooEntry) -> list[str]:
        params = config.parameters
        theta = params.theta
        k = entry.system.k
        findings: list[str] = []
        for name, symbols in (
            ("parameters.theta.past", theta.past),
            ("parameters.theta.tail", theta.tail or []),
            ("parameters.theta.future", theta.future),
            ("parameters.theta.future_tail", theta.future_tail or []),
        ):
            findings += ConfigValidator.symbol_findings(name, symbols, k)
        depths = params.depths or []
        if any(d < 0 for d in depths) or any(b <= a for a, b in zip(depths, depths[1:])):
            findings.append("parameters.depths: depths must be nonnegative and increasing")
        if params.reference not in REFERENCES:
            findings.append(f"parameters.reference: must be one of {', '.join(REFERENCES)}")
        if params.fiber_law not in FIBER_LAWS:
            findings.append(f"parameters.fiber_law: must be one of {', '.join(FIBER_LAWS)}")
        if params.base not in SPINE_BASES:
            findings.append(f"parameters.base: must be one of {', '.join(SPINE_BASES)}")
        if config.experiment == ExperimentKind.SPLIT_CHECK:
            findings += ConfigValidator.split_word_findings(config, entry)
        return findings


def validate(data: dict[str, Any]) -> list[str]:
    """
    Validate a raw configuration mapping without running anything.

    Args:
        data: Parsed TOML mapping

    Returns:
        Human-readable findings; an empty list means the configuration is runnable
    """
    config, findings = parse_config(data)
    if data.get("seed") is None:
        findings.append("seed required")
    if config is None:
        return findings

    system = config.system
    if (system.preset is None) == (system.maps is None):
        return findings + ["system: give exactly one of preset or maps"]
    if config.base is not None:
        matrix = ConfigValidator.matrix_findings(config.base)
        if matrix:
            return findings + matrix

    try:
        entry = resolve_system(config)
    except SkewGraphError as e:
        return findings + [f"system: {e}"]
    findings += ConfigValidator.parameter_findings(config, entry)
    logger.debug(f"Validated {config.experiment.value} config: {len(findings)} findings")
    return findings
