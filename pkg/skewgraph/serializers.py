"""JSON-safe conversion of domain values for experiment outputs."""

import dataclasses
import math
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np

from skewgraph.models.base import format_fraction
from skewgraph.models.maps import PLMap, ProductMap
from skewgraph.models.sets import BoxUnion, IntervalUnion
from skewgraph.models.symbols import MarkovSpec, SymbolWindow
from skewgraph.models.system import SkewSystem


def serialize_window(window: SymbolWindow) -> dict[str, Any]:
    return {
        "alphabet_size": window.alphabet_size,
        "core_offset": window.core_offset,
        "core": list(window.core),
        "left_tail": list(window.left_tail),
        "right_tail": list(window.right_tail),
    }


def _float(value: float) -> float | str:
    return value if math.isfinite(value) else str(value)


def serialize_value(obj: Any) -> Any:
    """
    Serialize a domain value to JSON-compatible structures.

    Fractions become "p/q" strings, non-finite floats become "inf"/"nan" strings, and
    dataclasses are walked field by field.

    Args:
        obj: Value to serialize

    Returns:
        Dicts, lists, strings, numbers, booleans or None
    """
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return _float(float(obj))
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return serialize_value(obj.tolist())
    if isinstance(obj, SymbolWindow):
        return serialize_window(obj)
    if isinstance(obj, (PLMap, ProductMap, MarkovSpec, SkewSystem)):
        return serialize_value(obj.to_dict())
    if isinstance(obj, (IntervalUnion, BoxUnion)):
        return serialize_value(obj.to_rows())
    if isinstance(obj, dict):
        return {str(k): serialize_value(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [serialize_value(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        result = {}
        for f in dataclasses.fields(obj):
            if f.name.startswith("_"):
                continue
            result[f.name] = serialize_value(getattr(obj, f.name))
        return result
    if hasattr(obj, "__dict__"):
        return {k: serialize_value(v) for k, v in vars(obj).items() if not k.startswith("_")}
    return str(obj)
