"""Line-oriented text format for empirical measures.

The first line is a header ``# skewgraph-measure k=<k> m=<m>``. Every further line holds one
atom as ``offset|core|left_tail|right_tail<TAB>x_1,...,x_m<TAB>weight`` with symbols
comma-separated and coordinates and weights written as ``p/q``.
"""

from pathlib import Path

from skewgraph.exceptions import ArtifactError, ValidationError
from skewgraph.models.base import format_fraction, to_fraction
from skewgraph.models.measure import Atom, EmpiricalMeasure
from skewgraph.models.symbols import SymbolWindow

HEADER = "# skewgraph-measure"


def _symbols(values: tuple[int, ...]) -> str:
    return ",".join(str(s) for s in values)


def _parse_symbols(text: str) -> tuple[int, ...]:
    return tuple(int(s) for s in text.split(",")) if text else ()


def format_measure(measure: EmpiricalMeasure) -> str:
    lines = [f"{HEADER} k={measure.alphabet_size} m={measure.dimension}"]
    for atom in measure.atoms:
        w = atom.window
        window = "|".join(
            [str(w.core_offset), _symbols(w.core), _symbols(w.left_tail), _symbols(w.right_tail)]
        )
        point = ",".join(format_fraction(c) for c in atom.point)
        lines.append(f"{window}\t{point}\t{format_fraction(atom.weight)}")
    return "\n".join(lines) + "\n"


def parse_measure(text: str) -> EmpiricalMeasure:
    """
    Parse the text format back into a measure.

    Raises:
        ValidationError: If the header or a line is malformed
    """
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith(HEADER):
        raise ValidationError("Missing measure header", "measure")
    fields = dict(p.split("=", 1) for p in lines[0][len(HEADER) :].split() if "=" in p)
    try:
        k = int(fields["k"])
    except (KeyError, ValueError):
        raise ValidationError("Header must declare k", "measure") from None
    atoms = []
    for number, line in enumerate(lines[1:], start=2):
        try:
            window_text, point_text, weight_text = line.split("\t")
            offset, core, left, right = window_text.split("|")
            window = SymbolWindow(
                k, _parse_symbols(core), int(offset), _parse_symbols(left), _parse_symbols(right)
            )
            point = tuple(to_fraction(c) for c in point_text.split(","))
            atoms.append(Atom(window, point, to_fraction(weight_text)))
        except ValidationError:
            raise
        except ValueError as e:
            raise ValidationError(f"Malformed atom on line {number}: {e}", "measure") from e
    return EmpiricalMeasure(tuple(atoms))


def write_measure(measure: EmpiricalMeasure, path: Path | str) -> None:
    try:
        Path(path).write_text(format_measure(measure), encoding="utf-8")
    except OSError as e:
        raise ArtifactError(f"Failed to write measure to {path}", e) from e


def read_measure(path: Path | str) -> EmpiricalMeasure:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ArtifactError(f"Failed to read measure from {path}", e) from e
    return parse_measure(text)
