import json
from typing import Any, List, Optional

import numpy as np

from src.core.exceptions import ModelParseError
from src.geometry import Polytope


def load_json(text: str, what: str = 'document') -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelParseError(f"Invalid JSON in {what}: {e.msg}", line=e.lineno, column=e.colno) from e


def to_label(value: Any):
    """JSON lists become tuples so labels stay hashable."""
    if isinstance(value, list):
        return tuple(to_label(v) for v in value)
    return value


def from_label(value: Any):
    if isinstance(value, tuple):
        return [from_label(v) for v in value]
    return value


def to_polytope(rows: Any, dim: Optional[int], where: str, issues: List[str]) -> Optional[Polytope]:
    """Rows [normal..., offset] -> Polytope; problems are appended to issues."""
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError):
        issues.append(f"{where}: polytope rows must be numbers")
        return None
    if arr.ndim != 2 or arr.shape[1] < 2:
        issues.append(f"{where}: polytope must be a list of [normal..., offset] rows")
        return None
    if dim is not None and arr.shape[1] != dim + 1:
        issues.append(f"{where}: rows have {arr.shape[1] - 1} coefficients, expected {dim}")
        return None
    if not np.all(np.isfinite(arr)):
        issues.append(f"{where}: non-finite coefficients")
        return None
    return Polytope.from_rows(arr)


def polytope_rows(poly: Polytope) -> List[List[float]]:
    return poly.to_rows()


def require(obj: dict, key: str, where: str, issues: List[str], default=None):
    if not isinstance(obj, dict) or key not in obj:
        issues.append(f"{where}: missing key '{key}'")
        return default
    return obj[key]


def to_number(value: Any, where: str, issues: List[str], default: float = 0.0) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        issues.append(f"{where}: expected a number, got {value!r}")
        return default


def to_labels(raw: Any, where: str, issues: List[str]) -> tuple:
    if not isinstance(raw, list):
        issues.append(f"{where} must be a list")
        return ()
    return tuple(to_label(v) for v in raw)


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + '\n'
