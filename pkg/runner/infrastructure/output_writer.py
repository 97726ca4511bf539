"""Self-describing output files: CSV with '#' metadata lines, JSON summaries, instance dumps."""

import csv
import hashlib
import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Union

import numpy as np

import shared
from shared.domain.models import Instance, frozen_array
from shared.domain.payloads import ExperimentConfig, RunMetadata

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class CsvTable(NamedTuple):
    metadata: Dict[str, str]
    header: List[str]
    rows: List[List[str]]

    def column(self, name: str) -> np.ndarray:
        """One column parsed as floats."""
        index = self.header.index(name)
        return np.array([float(row[index]) for row in self.rows])


def config_hash(experiment: ExperimentConfig) -> str:
    """sha256 of the config's canonical JSON (sorted keys, no whitespace)."""
    canonical = json.dumps(
        experiment.model_dump(mode="json"), sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def build_metadata(command: str, experiment: ExperimentConfig) -> RunMetadata:
    return RunMetadata(
        command=command,
        seed=experiment.seed,
        config_hash=config_hash(experiment),
        version=shared.__version__,
    )


def format_cell(value: object) -> str:
    """Lossless text for one CSV cell; floats use repr so they re-read exactly."""
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[object]],
              metadata: Optional[RunMetadata] = None, extra: Optional[Dict[str, object]] = None) -> Path:
    """Write '# key=value' metadata lines, a header row, then the rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as f:
        if metadata is not None:
            for line in metadata.comment_lines():
                f.write(f"{line}\n")
        for key, value in (extra or {}).items():
            f.write(f"# {key}={format_cell(value)}\n")
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"Row has {len(row)} cells, header has {len(header)}")
            writer.writerow([format_cell(cell) for cell in row])
            count += 1
    logger.debug(f"Wrote {count} rows to {path}")
    return path


def read_csv(path: PathLike) -> CsvTable:
    """Inverse of ``write_csv``: metadata lines, header and raw string rows."""
    metadata: Dict[str, str] = {}
    data_lines: List[str] = []
    with Path(path).open("r", newline="", encoding="utf-8") as f:
        for line in f:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                metadata[key.strip()] = value.strip()
            else:
                data_lines.append(line)
    reader = csv.reader(data_lines)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError(f"{path} has no header row")
    return CsvTable(metadata=metadata, header=header, rows=[row for row in reader if row])


def _json_default(value: object) -> object:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def write_json(path: PathLike, payload: Dict[str, object],
               metadata: Optional[RunMetadata] = None) -> Path:
    """Scalar summaries; infinite thresholds are written as the JSON constant Infinity."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = dict(payload)
    if metadata is not None:
        document = {"metadata": metadata.model_dump(), **document}
    with path.open("w", encoding="utf-8") as f:
        json.dump(document, f, indent=2, default=_json_default, allow_nan=True)
        f.write("\n")
    return path


def read_json(path: PathLike) -> Dict[str, object]:
    with Path(path).open("r", encoding="utf-8") as f:
        return json.load(f)


def write_instance_dump(path: PathLike, instance: Instance) -> Path:
    """npz with n, delta, signal and the upper triangle (diagonal included) of w, row-major."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows, cols = np.triu_indices(instance.n)
    with path.open("wb") as f:
        np.savez(
            f,
            n=np.int64(instance.n),
            delta=np.float64(instance.delta),
            signal=np.asarray(instance.signal, dtype=float),
            w=np.asarray(instance.w_matrix, dtype=float)[rows, cols],
        )
    return path


def read_instance_dump(path: PathLike) -> Instance:
    """Rebuild an instance written by ``write_instance_dump``.

    Raises:
        ValueError: If the array sizes disagree with n
    """
    with np.load(Path(path)) as data:
        n = int(data["n"])
        delta = float(data["delta"])
        signal = np.array(data["signal"], dtype=float)
        upper = np.array(data["w"], dtype=float)
    if signal.size != n or upper.size != n * (n + 1) // 2:
        raise ValueError(
            f"Instance dump {path} is inconsistent: n={n}, signal={signal.size}, w={upper.size}"
        )
    w_matrix = np.zeros((n, n))
    w_matrix[np.triu_indices(n)] = upper
    w_matrix = w_matrix + np.triu(w_matrix, 1).T
    return Instance(n=n, w_matrix=frozen_array(w_matrix), signal=frozen_array(signal), delta=delta)


def write_edge_list(path: PathLike, adjacency: np.ndarray,
                    metadata: Optional[RunMetadata] = None) -> Path:
    """One 'i j' line per undirected edge with i < j."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows, cols = np.nonzero(np.triu(np.asarray(adjacency), 1))
    with path.open("w", encoding="utf-8") as f:
        if metadata is not None:
            for line in metadata.comment_lines():
                f.write(f"{line}\n")
        for i, j in zip(rows, cols):
            f.write(f"{i} {j}\n")
    logger.debug(f"Wrote {rows.size} edges to {path}")
    return path


def write_errors(path: PathLike, command: str, errors: List[dict]) -> Path:
    """Machine-readable failure summary."""
    return write_json(path, {"command": command, "failed": len(errors), "errors": errors})
