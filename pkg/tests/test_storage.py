"""Tests for artifact directories, the measure text format and JSON serialization."""

import json
from fractions import Fraction

import numpy as np
import pytest

pytestmark = pytest.mark.unit

from skewgraph.exceptions import ArtifactError, ValidationError
from skewgraph.models.results import ConvergenceRow
from skewgraph.models.sets import IntervalUnion
from skewgraph.models.symbols import SymbolWindow
from skewgraph.serializers import serialize_value, serialize_window
from skewgraph.services.measure_service import measure_from_points
from skewgraph.storage import (
    DATA_FILE,
    RESULTS_FILE,
    ArtifactStore,
    format_measure,
    parse_measure,
    read_measure,
    write_measure,
)
from skewgraph.storage.artifacts import format_cell


class TestArtifactStore:
    """Tests for staged writes."""

    def test_commit_moves_files(self, output_dir):
        store = ArtifactStore(output_dir)
        with store.transaction() as staged:
            staged.write_json(RESULTS_FILE, {"value": Fraction(1, 3)})
            staged.write_csv(DATA_FILE, ["n", "distance"], [(1, 0.5), (2, 0.25)])
            assert not output_dir.exists()
        assert store.read_json() == {"value": "1/3"}
        assert (output_dir / DATA_FILE).read_text() == "n,distance\n1,0.5\n2,0.25\n"

    def test_failure_leaves_nothing_behind(self, output_dir):
        store = ArtifactStore(output_dir)
        with pytest.raises(RuntimeError):
            with store.transaction() as staged:
                staged.write_text(RESULTS_FILE, "{}")
                raise RuntimeError("boom")
        assert not output_dir.exists()
        assert list(output_dir.parent.iterdir()) == []

    def test_rerun_replaces_files(self, output_dir):
        store = ArtifactStore(output_dir)
        for value in (1, 2):
            with store.transaction() as staged:
                staged.write_json(RESULTS_FILE, {"value": value})
        assert store.read_json() == {"value": 2}

    def test_missing_results(self, output_dir):
        with pytest.raises(ArtifactError):
            ArtifactStore(output_dir).read_json()


class TestFormatCell:
    @pytest.mark.parametrize(
        "value, text",
        [
            (None, ""),
            (0.1, "0.1"),
            (Fraction(3, 8), "3/8"),
            (7, "7"),
            ("converged", "converged"),
            ([1, 2], "[1, 2]"),
        ],
    )
    def test_cells(self, value, text):
        assert format_cell(value) == text


class TestMeasureFormat:
    """Tests for the measure text format."""

    @pytest.fixture
    def measure(self):
        windows = [
            SymbolWindow.from_past(2, (2, 1), (1,), future=(2,)),
            SymbolWindow.periodic(2, (1, 2)),
        ]
        return measure_from_points(windows, [("1/3",), ("3/4",)], weights=[1, 2])

    def test_header(self, measure):
        assert format_measure(measure).splitlines()[0] == "# skewgraph-measure k=2 m=1"

    def test_parse_restores_atoms(self, measure):
        parsed = parse_measure(format_measure(measure))
        assert [a.window for a in parsed.atoms] == [a.window for a in measure.atoms]
        assert [a.point for a in parsed.atoms] == [(Fraction(1, 3),), (Fraction(3, 4),)]
        assert [a.weight for a in parsed.atoms] == [Fraction(1, 3), Fraction(2, 3)]

    def test_file_round_trip(self, measure, tmp_path):
        path = tmp_path / "mu.txt"
        write_measure(measure, path)
        assert read_measure(path).windows() == measure.windows()

    def test_missing_header(self):
        with pytest.raises(ValidationError, match="header"):
            parse_measure("0|1|1|1\t0\t1\n")

    def test_malformed_line(self):
        with pytest.raises(ValidationError, match="line 2"):
            parse_measure("# skewgraph-measure k=2 m=1\nnot an atom\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ArtifactError):
            read_measure(tmp_path / "absent.txt")


class TestSerializeValue:
    """Tests for JSON-safe conversion."""

    def test_scalars(self):
        assert serialize_value(Fraction(1, 3)) == "1/3"
        assert serialize_value(Fraction(4, 2)) == "2"
        assert serialize_value(float("inf")) == "inf"
        assert serialize_value(np.int64(3)) == 3
        assert serialize_value(np.array([0.5, 1.0])) == [0.5, 1.0]

    def test_dataclass(self):
        row = ConvergenceRow(n=4, distance=0.125, error_bound=1e-9)
        assert serialize_value(row) == {"n": 4, "distance": 0.125, "error_bound": 1e-9}

    def test_interval_union(self):
        rows = serialize_value(IntervalUnion.of((0, "1/4")))
        assert rows == [{"component": 0, "coordinate": 0, "low": "0", "high": "1/4"}]

    def test_window(self):
        data = serialize_window(SymbolWindow.constant(3, 2))
        assert data["alphabet_size"] == 3
        assert json.dumps(serialize_value(SymbolWindow.constant(3, 2))) == json.dumps(data)
