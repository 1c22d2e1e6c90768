"""Experiment output directory with staged, all-or-nothing writes."""

import csv
import io
import json
import logging
import os
import shutil
import tempfile
from collections.abc import Generator, Iterable, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import Any

from skewgraph.exceptions import ArtifactError
from skewgraph.serializers import serialize_value

logger = logging.getLogger(__name__)

RESULTS_FILE = "results.json"
DATA_FILE = "data.csv"
PLOT_FILE = "plot.svg"


def format_cell(value: Any) -> str:
    """CSV cell text: floats by repr so reruns reproduce the exact bytes."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    serialized = serialize_value(value)
    return serialized if isinstance(serialized, str) else json.dumps(serialized)


class StagedArtifacts:
    """Writer bound to a staging directory; files become visible on commit."""

    def __init__(self, directory: Path):
        self.directory = directory
        self.written: list[str] = []

    def path(self, name: str) -> Path:
        return self.directory / name

    def write_text(self, name: str, text: str) -> Path:
        target = self.path(name)
        with open(target, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        self.written.append(name)
        return target

    def write_json(self, name: str, payload: Any) -> Path:
        text = json.dumps(serialize_value(payload), indent=2, sort_keys=True)
        return self.write_text(name, text + "\n")

    def write_csv(
        self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]
    ) -> Path:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
        return self.write_text(name, buffer.getvalue())


class ArtifactStore:
    """Output directory of one experiment run."""

    def __init__(self, directory: Path | str):
        """
        Initialize the store.

        Args:
            directory: Output directory; created on first commit
        """
        self.directory = Path(directory)

    @contextmanager
    def transaction(self) -> Generator[StagedArtifacts, None, None]:
        """
        Context manager for staged writes.

        Files are written to a staging directory next to the output directory and moved into
        place only when the block completes. On error the staging directory is removed and
        the output directory is left as it was.

        Usage:
            with store.transaction() as staged:
                staged.write_json("results.json", summary)

        Raises:
            ArtifactError: If staging or committing fails
        """
        try:
            self.directory.parent.mkdir(parents=True, exist_ok=True)
            staging = Path(
                tempfile.mkdtemp(prefix=f".{self.directory.name}-", dir=self.directory.parent)
            )
        except OSError as e:
            message = f"Failed to create staging directory for {self.directory}"
            raise ArtifactError(message, e) from e

        staged = StagedArtifacts(staging)
        try:
            yield staged
            self._commit(staged)
        except ArtifactError:
            raise
        except OSError as e:
            raise ArtifactError(f"Failed to write artifacts to {self.directory}", e) from e
        finally:
            shutil.rmtree(staging, ignore_errors=True)

    def _commit(self, staged: StagedArtifacts) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        for name in staged.written:
            os.replace(staged.path(name), self.directory / name)
        logger.info(f"Wrote {', '.join(staged.written)} to {self.directory}")

    def read_json(self, name: str = RESULTS_FILE) -> Any:
        try:
            with open(self.directory / name, encoding="utf-8") as handle:
                return json.load(handle)
        except (OSError, json.JSONDecodeError) as e:
            raise ArtifactError(f"Failed to read {name} from {self.directory}", e) from e
