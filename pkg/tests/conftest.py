"""Shared pytest fixtures and test utilities for skewgraph tests."""

import logging
from fractions import Fraction
from pathlib import Path
from typing import Any

import pytest

from skewgraph.config import Settings
from skewgraph.models.sets import FiberSet, IntervalUnion
from skewgraph.models.symbols import SymbolWindow
from skewgraph.models.zoo import ZooEntry
from skewgraph.services import AttractorService, MeasureService, SplittingService, ZooService
from skewgraph.services.zoo import (
    build_binary_ifs,
    build_kpair_system,
    build_msplits,
    build_spine_family,
)


@pytest.fixture(autouse=True)
def restore_logging():
    """The CLI replaces root handlers; put them back after every test."""
    root = logging.getLogger()
    handlers = root.handlers[:]
    level = root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def settings() -> Settings:
    """Fresh settings that ignore the process-wide cache."""
    return Settings(threads=1, log_format="text")


@pytest.fixture
def attractor_service(settings):
    return AttractorService(settings)


@pytest.fixture
def splitting_service(settings):
    return SplittingService(settings)


@pytest.fixture
def measure_service(settings, attractor_service):
    return MeasureService(settings, attractor_service)


@pytest.fixture
def zoo_service(settings):
    return ZooService(settings)


@pytest.fixture
def binary_entry() -> ZooEntry:
    return build_binary_ifs()


@pytest.fixture
def msplits_entry() -> ZooEntry:
    return build_msplits()


@pytest.fixture
def kpair_entry() -> ZooEntry:
    return build_kpair_system()


@pytest.fixture
def spine_family_entry() -> ZooEntry:
    return build_spine_family(m=2)


@pytest.fixture
def output_dir(tmp_path) -> Path:
    """Output directory that does not exist yet."""
    return tmp_path / "results"


@pytest.fixture
def write_config(tmp_path):
    """Write a TOML config and return its path."""

    def write(text: str, name: str = "experiment.toml") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    return f'"{value}"'


class TestDataGenerator:
    """Utility class for generating test data."""

    @staticmethod
    def window(k: int, past: tuple, tail: tuple, future: tuple = ()) -> SymbolWindow:
        """Window with the past given nearest symbol first."""
        return SymbolWindow.from_past(k, past, tail, future)

    @staticmethod
    def binary_value(past: tuple) -> Fraction:
        """ρ(θ) of the binary IFS for a past followed by a tail of 1s."""
        return sum(
            (Fraction(s - 1, 2 ** (j + 1)) for j, s in enumerate(past)), Fraction(0)
        )

    @staticmethod
    def config_data(
        experiment: str,
        preset: str = "binary_ifs",
        seed: int | None = 0,
        parameters: dict | None = None,
        overrides: dict | None = None,
        theta: dict | None = None,
    ) -> dict:
        """Config mapping as tomllib would return it."""
        data: dict[str, Any] = {
            "system": {"preset": preset, "overrides": overrides or {}},
            "experiment": experiment,
            "parameters": dict(parameters or {}),
        }
        if theta is not None:
            data["parameters"]["theta"] = theta
        if seed is not None:
            data["seed"] = seed
        return data

    @staticmethod
    def config_toml(
        experiment: str,
        preset: str = "binary_ifs",
        seed: int | None = 0,
        parameters: dict | None = None,
        overrides: dict | None = None,
        theta: dict | None = None,
        transition: list | None = None,
    ) -> str:
        """The same config written as TOML text."""
        lines = [f'experiment = "{experiment}"']
        if seed is not None:
            lines.append(f"seed = {seed}")
        lines += ["", "[system]", f'preset = "{preset}"']
        if overrides:
            lines += ["", "[system.overrides]"]
            lines += [f"{k} = {_toml_value(v)}" for k, v in overrides.items()]
        if transition is not None:
            lines += ["", "[base]", f"transition = {_toml_value(transition)}"]
        lines += ["", "[parameters]"]
        lines += [f"{k} = {_toml_value(v)}" for k, v in (parameters or {}).items()]
        if theta is not None:
            lines += ["", "[parameters.theta]"]
            lines += [f"{k} = {_toml_value(v)}" for k, v in theta.items()]
        return "\n".join(lines) + "\n"


class AssertionHelpers:
    """Helper functions for test assertions."""

    @staticmethod
    def assert_sets_close(actual: FiberSet, expected: FiberSet, tol: float = 1e-12):
        """Assert equal component counts and a small Hausdorff distance."""
        assert len(actual) == len(expected), f"{actual} has {len(actual)} components"
        distance = float(actual.hausdorff_distance(expected))
        assert distance <= tol, f"Hausdorff distance {distance:.3g} exceeds {tol:.3g}"

    @staticmethod
    def assert_components(u: IntervalUnion, count: int, length: Fraction):
        assert len(u) == count
        assert all(piece == length for piece in u.lengths())

    @staticmethod
    def assert_point_close(point, expected, tol: float = 1e-9):
        assert len(point) == len(expected)
        for a, b in zip(point, expected):
            assert abs(float(a) - float(b)) <= tol, f"{point} differs from {expected}"


@pytest.fixture
def test_data_generator():
    """Provide TestDataGenerator instance."""
    return TestDataGenerator


@pytest.fixture
def assertion_helpers():
    """Provide AssertionHelpers instance."""
    return AssertionHelpers
