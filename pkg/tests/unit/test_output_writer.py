"""Tests for output files."""

import json
import math

import numpy as np
import pytest

from runner.infrastructure.output_writer import (
    build_metadata,
    config_hash,
    format_cell,
    read_csv,
    read_instance_dump,
    read_json,
    write_csv,
    write_edge_list,
    write_errors,
    write_instance_dump,
    write_json,
)
from shared.domain.consts import TransitionOrder
from shared.domain.payloads import ExperimentConfig
from simulation.services.instances import generate_instance


@pytest.fixture
def experiment():
    return ExperimentConfig(prior={"preset": "bernoulli", "rho": 0.02}, delta=0.001, seed=5)


class TestMetadata:
    """Tests for provenance."""

    def test_config_hash_is_stable_and_sensitive(self, experiment):
        """Test that the hash depends on the content only."""
        same = ExperimentConfig.model_validate(experiment.model_dump())
        assert config_hash(same) == config_hash(experiment)
        assert config_hash(experiment.model_copy(update={"seed": 6})) != config_hash(experiment)
        assert len(config_hash(experiment)) == 64

    def test_build_metadata(self, experiment):
        """Test command, seed and version fields."""
        metadata = build_metadata("se", experiment)
        assert metadata.command == "se"
        assert metadata.seed == 5
        assert metadata.version == "0.3.0"


class TestCsv:
    """Tests for CSV with metadata lines."""

    def test_format_cell(self):
        """Test the text of each cell kind."""
        assert format_cell(None) == ""
        assert format_cell(True) == "true"
        assert format_cell(np.float64(0.1)) == "0.1"
        assert format_cell(math.inf) == "inf"
        assert format_cell(-math.inf) == "-inf"
        assert format_cell(math.nan) == "nan"
        assert format_cell(np.int64(4)) == "4"
        assert format_cell(TransitionOrder.FIRST) == "first"

    def test_round_trip_is_exact(self, tmp_path, experiment):
        """Test that floats re-read bit for bit and metadata survives."""
        values = [1.0 / 3.0, 2.0**-40, 0.00122]
        path = write_csv(tmp_path / "out" / "t.csv", ["delta", "label"],
                         [[v, f"p{i}"] for i, v in enumerate(values)],
                         metadata=build_metadata("potential", experiment), extra={"window": 4})
        table = read_csv(path)
        assert table.metadata["command"] == "potential"
        assert table.metadata["seed"] == "5"
        assert table.metadata["window"] == "4"
        assert table.header == ["delta", "label"]
        assert table.column("delta").tolist() == values
        assert [row[1] for row in table.rows] == ["p0", "p1", "p2"]

    def test_metadata_lines_come_first(self, tmp_path, experiment):
        """Test the file layout."""
        path = write_csv(tmp_path / "t.csv", ["a"], [[1]], metadata=build_metadata("se", experiment))
        lines = path.read_text().splitlines()
        assert lines[0] == "# command=se"
        assert lines[4] == "a"

    def test_row_length_mismatch_raises(self, tmp_path):
        with pytest.raises(ValueError, match="cells"):
            write_csv(tmp_path / "t.csv", ["a", "b"], [[1]])

    def test_missing_header_raises(self, tmp_path):
        """Test reading a file with metadata only."""
        path = tmp_path / "empty.csv"
        path.write_text("# command=se\n")
        with pytest.raises(ValueError, match="no header"):
            read_csv(path)


class TestJson:
    """Tests for JSON summaries."""

    def test_infinity_and_numpy_values(self, tmp_path, experiment):
        """Test that infinite thresholds are written as Infinity and numpy values are converted."""
        path = write_json(tmp_path / "t.json",
                          {"delta_rs": math.inf, "order": TransitionOrder.NONE,
                           "curve": np.array([0.5, 0.25]), "count": np.int64(3)},
                          metadata=build_metadata("thresholds", experiment))
        assert "Infinity" in path.read_text()
        document = read_json(path)
        assert list(document)[0] == "metadata"
        assert math.isinf(document["delta_rs"])
        assert document["order"] == "none"
        assert document["curve"] == [0.5, 0.25]
        assert document["count"] == 3

    def test_unserialisable_value_raises(self, tmp_path):
        with pytest.raises(TypeError, match="not JSON serializable"):
            write_json(tmp_path / "t.json", {"bad": object()})

    def test_write_errors(self, tmp_path):
        """Test the failure summary document."""
        path = write_errors(tmp_path / "errors.json", "amp", [{"index": 2, "error": "ValueError: x"}])
        document = json.loads(path.read_text())
        assert document == {"command": "amp", "failed": 1, "errors": [{"index": 2, "error": "ValueError: x"}]}


class TestInstanceDump:
    """Tests for npz instance dumps."""

    def test_round_trip(self, tmp_path, rademacher):
        """Test that the symmetric matrix is rebuilt from its upper triangle."""
        instance = generate_instance(rademacher, 12, 0.3, rng_seed=2)
        restored = read_instance_dump(write_instance_dump(tmp_path / "i.npz", instance))
        assert restored.n == 12
        assert restored.delta == 0.3
        assert np.array_equal(restored.w_matrix, instance.w_matrix)
        assert np.array_equal(restored.signal, instance.signal)

    def test_inconsistent_dump_raises(self, tmp_path):
        """Test the size checks."""
        path = tmp_path / "bad.npz"
        np.savez(path, n=np.int64(3), delta=np.float64(1.0), signal=np.zeros(3), w=np.zeros(5))
        with pytest.raises(ValueError, match="inconsistent"):
            read_instance_dump(path)


class TestEdgeList:
    def test_edges_listed_once(self, tmp_path, experiment):
        """Test one 'i j' line per edge with i < j after the metadata."""
        adjacency = np.array([[0, 1, 1], [1, 0, 0], [1, 0, 0]])
        path = write_edge_list(tmp_path / "g.txt", adjacency, metadata=build_metadata("community", experiment))
        lines = [line for line in path.read_text().splitlines() if not line.startswith("#")]
        assert lines == ["0 1", "0 2"]
