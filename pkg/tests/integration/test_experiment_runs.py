"""End-to-end experiment runs through the command line."""

import csv
import json

import pytest

pytestmark = pytest.mark.integration

from skewgraph.cli import EXIT_OK, main
from skewgraph.services.zoo import family_spine_components
from skewgraph.storage import DATA_FILE, PLOT_FILE, RESULTS_FILE
from tests.conftest import TestDataGenerator

MEASURE_FILE = "measure.txt"


def _run(write_config, out, **config) -> dict:
    path = write_config(TestDataGenerator.config_toml(**config))
    assert main(["run", str(path), "--out", str(out)]) == EXIT_OK
    return json.loads((out / RESULTS_FILE).read_text())


def _rows(out) -> list[dict]:
    with open(out / DATA_FILE, newline="") as handle:
        return list(csv.DictReader(handle))


class TestReproducibility:
    """Reruns with the same config and seed produce the same bytes."""

    def test_wasserstein_curve_rerun(self, write_config, tmp_path):
        config = dict(
            experiment="wasserstein-curve",
            seed=11,
            parameters={
                "n_atoms": 20,
                "depths": [0, 5, 10],
                "word_length": 24,
                "base_depth": 8,
                "reference": "paired",
            },
        )
        first, second = tmp_path / "a", tmp_path / "b"
        _run(write_config, first, **config)
        _run(write_config, second, **config)
        for name in (RESULTS_FILE, DATA_FILE, PLOT_FILE, MEASURE_FILE):
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def test_seed_changes_samples(self, write_config, tmp_path):
        config = dict(
            experiment="graph-sample", parameters={"n_points": 10, "word_length": 32}
        )
        _run(write_config, tmp_path / "a", seed=1, **config)
        _run(write_config, tmp_path / "b", seed=2, **config)
        assert _rows(tmp_path / "a") != _rows(tmp_path / "b")


class TestTopologyRuns:
    """Coding, spines and splitting through the full pipeline."""

    def test_all_twos_codes_to_one(self, write_config, output_dir):
        results = _run(
            write_config, output_dir, experiment="code", theta={"past": [], "tail": [2]}
        )
        assert results["summary"]["point"][0] == pytest.approx(1.0, abs=1e-9)

    def test_spine_family_rows(self, write_config, output_dir):
        results = _run(
            write_config,
            output_dir,
            experiment="spine",
            preset="spine_family",
            theta={"past": [], "tail": [1, 2]},
        )
        assert results["summary"]["n_components"] == 2
        rows = _rows(output_dir)
        assert len(rows) == 2
        for row, (low, high) in zip(rows, family_spine_components(2)):
            assert float(row["low"]) == pytest.approx(float(low), abs=1e-12)
            assert float(row["high"]) == pytest.approx(float(high), abs=1e-12)

    def test_theorem2_preset_rows(self, write_config, output_dir):
        _run(
            write_config,
            output_dir,
            experiment="spine",
            preset="theorem2",
            overrides={"m": 2},
            theta={"past": [], "tail": [1, 2]},
        )
        assert len(_rows(output_dir)) == 2

    def test_split_check_with_sweep(self, write_config, output_dir):
        results = _run(
            write_config,
            output_dir,
            experiment="split-check",
            preset="msplits",
            overrides={"m": 2},
            parameters={"n_words": 30, "max_length": 12},
        )
        assert results["summary"]["gaps"] == ["1/16", "1/16"]
        assert results["summary"]["sweep_overlaps"] == 0

    def test_omega_limit_covers_graph(self, write_config, output_dir):
        results = _run(
            write_config,
            output_dir,
            experiment="omega",
            theta={"disjunctive": 4},
            parameters={"burn_in": 50, "n_iter": 2000, "n_points": 20, "cylinder_depth": 3},
        )
        assert results["summary"]["graph_points"] == 20
        # radius-3 agreement: d0 <= 2^-4, and three common past symbols give d1 <= 2^-3
        assert results["summary"]["coverage"] <= 3 * 2.0**-4

    @pytest.mark.slow
    def test_omega_limit_covers_spine_family_graph(self, write_config, output_dir):
        results = _run(
            write_config,
            output_dir,
            experiment="omega",
            preset="theorem2",
            theta={"disjunctive": 4},
            parameters={
                "burn_in": 1000,
                "n_iter": 1_000_000,
                "n_points": 100,
                "cylinder_depth": 3,
            },
        )
        assert results["summary"]["graph_points"] >= 90
        # windows agreeing on [-3, 3] are charged d0 = 2^-4
        assert results["summary"]["coverage"] <= 2.0**-4 + 0.05


class TestMeasureRuns:
    """Measure experiments through the full pipeline."""

    def test_sync_curve(self, write_config, output_dir):
        results = _run(
            write_config,
            output_dir,
            experiment="sync-curve",
            theta={"past": [2], "tail": [1, 2], "future": [2, 1, 1, 2]},
            parameters={"x": "1/3", "depths": [0, 5, 20]},
        )
        assert results["summary"]["n_not_coded"] == 0
        assert results["summary"]["final_distance"] <= 2.0**-20 + 1e-8
        assert (output_dir / PLOT_FILE).is_file()

    def test_milnor_fraction_reaches_one(self, write_config, output_dir):
        results = _run(
            write_config,
            output_dir,
            experiment="milnor",
            parameters={"n_atoms": 30, "depths": [0, 40], "tol": 1e-6},
        )
        assert results["summary"]["final_fraction"] == pytest.approx(1.0)

    def test_disintegration_checks_pass(self, write_config, output_dir):
        results = _run(
            write_config,
            output_dir,
            experiment="disintegration",
            parameters={"n_atoms": 40, "word_length": 12, "n_checks": 10, "fiber_law": "grid"},
        )
        assert results["summary"]["all_equal"]
        assert (output_dir / MEASURE_FILE).read_text().startswith("# skewgraph-measure k=2 m=1")

    def test_perturbation_without_jitter(self, write_config, output_dir):
        results = _run(
            write_config,
            output_dir,
            experiment="perturbation",
            preset="kpair",
            parameters={"delta": 0.0, "depth": 50},
        )
        assert results["summary"]["valid"] == 5
        assert results["summary"]["spine_components_unchanged"]
        assert len(_rows(output_dir)) == 5

    @pytest.mark.slow
    def test_decay_rate_of_binary_system(self, write_config, output_dir):
        results = _run(
            write_config,
            output_dir,
            experiment="decay",
            parameters={"depths": [2, 4, 8, 16], "n_samples": 500},
        )
        assert results["summary"]["fitted_lambda"] == pytest.approx(0.5)

    @pytest.mark.slow
    def test_msplits_curve_decays(self, write_config, output_dir):
        depths = list(range(0, 61, 5))
        results = _run(
            write_config,
            output_dir,
            experiment="wasserstein-curve",
            preset="msplits",
            parameters={
                "n_atoms": 500,
                "depths": depths,
                "word_length": 64,
                "base_depth": 24,
                "tol": 1e-14,
                "fiber_law": "uniform",
                "reference": "paired",
            },
        )
        rows = _rows(output_dir)
        assert [int(r["n"]) for r in rows] == depths
        tail = [r for r in rows if int(r["n"]) >= 10]
        for before, after in zip(tail, tail[1:]):
            slack = max(float(before["error_bound"]), float(after["error_bound"]))
            assert float(after["distance"]) <= float(before["distance"]) + slack
        assert results["summary"]["fit_slope"] < 0
        assert results["summary"]["fit_r2"] >= 0.9

    @pytest.mark.slow
    def test_fresh_wasserstein_curve(self, write_config, output_dir):
        results = _run(
            write_config,
            output_dir,
            experiment="wasserstein-curve",
            parameters={"n_atoms": 50, "depths": [0, 10, 20], "word_length": 32},
        )
        rows = _rows(output_dir)
        assert [int(r["n"]) for r in rows] == [0, 10, 20]
        assert results["summary"]["n_atoms"] == 50
