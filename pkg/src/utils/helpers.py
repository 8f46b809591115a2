from typing import List

import numpy as np

from src.core.exceptions import ConfigurationError
from src.geometry import Polytope


def parse_floats(text: str) -> List[float]:
    try:
        return [float(part) for part in str(text).split(',') if part.strip()]
    except ValueError:
        raise ConfigurationError(f"Expected comma-separated numbers, got {text!r}")


def parse_box(text: str) -> Polytope:
    """lo,hi per axis: "0,4,0,4" is the square [0,4] x [0,4]."""
    values = parse_floats(text)
    if not values or len(values) % 2:
        raise ConfigurationError(f"Box needs lo,hi pairs per axis, got {text!r}")
    lo = np.array(values[0::2])
    hi = np.array(values[1::2])
    if np.any(hi <= lo):
        raise ConfigurationError(f"Box {text!r} has an empty side")
    return Polytope.box(lo, hi)


def magnitudes(count: int, largest: float) -> List[float]:
    """count evenly spaced disturbance magnitudes ending at largest, starting above zero."""
    if count < 1:
        return []
    return [largest * (k + 1) / count for k in range(count)]
