"""Convex polytopes in half-space form and affine maps between them.

Every constructor normalises rows to unit normals, so constraint slack is a
Euclidean distance and the tolerances in settings.json apply uniformly.
Polytopes are closed and immutable; derived data (vertices, volume,
boundedness) is cached on the instance.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from src.core.exceptions import (
    DimensionMismatchError,
    EmptyPolytopeError,
    GeometryError,
    NonInvertibleMapError,
    UnboundedPolytopeError
)
from src.core.loader import get_tolerances
from src.geometry import linprog

_ZERO_ROW = 1e-14


class Polytope:
    __slots__ = ('A', 'b', 'dim', '_cache')

    def __init__(self, A, b, bounded: Optional[bool] = None):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatchError(f"{A.shape[0]} normals but {b.shape[0]} offsets")
        self.dim = A.shape[1]
        self.A, self.b = _normalise(A, b)
        self.A.setflags(write=False)
        self.b.setflags(write=False)
        self._cache: Dict[str, object] = {}
        if bounded is not None:
            self._cache['bounded'] = bounded

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float]) -> 'Polytope':
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        eye = np.eye(len(lo))
        return cls(np.vstack([eye, -eye]), np.concatenate([hi, -lo]), bounded=True)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]], dim: Optional[int] = None) -> 'Polytope':
        rows = np.asarray(rows, dtype=float)
        if rows.size == 0:
            if dim is None:
                raise GeometryError("Cannot infer dimension of an empty row list")
            return cls(np.zeros((0, dim)), np.zeros(0), bounded=False)
        rows = np.atleast_2d(rows)
        return cls(rows[:, :-1], rows[:, -1])

    def to_rows(self) -> List[List[float]]:
        return [list(map(float, self.A[i])) + [float(self.b[i])] for i in range(len(self.b))]

    def __len__(self) -> int:
        return len(self.b)

    def __repr__(self) -> str:
        return f"Polytope(dim={self.dim}, rows={len(self.b)})"


def _normalise(A: np.ndarray, b: np.ndarray):
    if A.shape[0] == 0:
        return A.copy(), b.copy()
    norms = np.linalg.norm(A, axis=1)
    zero = norms < _ZERO_ROW
    keep_A, keep_b = [], []
    seen: Dict[tuple, int] = {}
    for i in range(A.shape[0]):
        if zero[i]:
            if b[i] >= 0:
                continue
            # 0 <= negative: keep an explicit infeasible row
            keep_A.append(np.zeros(A.shape[1]))
            keep_b.append(-1.0)
            continue
        normal = A[i] / norms[i]
        offset = b[i] / norms[i]
        key = tuple(np.round(normal, 12))
        if key in seen:
            idx = seen[key]
            keep_b[idx] = min(keep_b[idx], offset)
            continue
        seen[key] = len(keep_A)
        keep_A.append(normal)
        keep_b.append(offset)
    if not keep_A:
        return np.zeros((0, A.shape[1])), np.zeros(0)
    return np.array(keep_A), np.array(keep_b)


@dataclass(frozen=True, eq=False)
class AffineMap:
    """x -> matrix @ x + offset."""
    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        matrix = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        offset = np.asarray(self.offset, dtype=float).reshape(-1)
        if matrix.shape[0] != matrix.shape[1] or matrix.shape[0] != offset.shape[0]:
            raise DimensionMismatchError(f"Affine map shapes {matrix.shape} and {offset.shape} disagree")
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'offset', offset)

    @classmethod
    def identity(cls, dim: int) -> 'AffineMap':
        return cls(np.eye(dim), np.zeros(dim))

    @classmethod
    def translation(cls, shift: Sequence[float]) -> 'AffineMap':
        shift = np.asarray(shift, dtype=float)
        return cls(np.eye(len(shift)), shift)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    @property
    def invertible(self) -> bool:
        return abs(self.det) > get_tolerances().eps_det

    def inverse_matrix(self) -> np.ndarray:
        if not self.invertible:
            raise NonInvertibleMapError(f"Map with determinant {self.det:.3e} is not invertible")
        return np.linalg.inv(self.matrix)

    def apply(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float) + self.offset

    def to_dict(self) -> dict:
        return {'M': self.matrix.tolist(), 'c': self.offset.tolist()}


def _check_dims(p: Polytope, dim: int):
    if p.dim != dim:
        raise DimensionMismatchError(f"Dimension {p.dim} does not match {dim}")


def intersect(p: Polytope, q: Polytope) -> Polytope:
    _check_dims(q, p.dim)
    bounded = True if (p._cache.get('bounded') or q._cache.get('bounded')) else None
    return Polytope(np.vstack([p.A, q.A]), np.concatenate([p.b, q.b]), bounded=bounded)


def affine_image(p: Polytope, f: AffineMap) -> Polytope:
    _check_dims(p, f.dim)
    inv = f.inverse_matrix()
    A = p.A @ inv
    return Polytope(A, p.b + A @ f.offset, bounded=p._cache.get('bounded'))


def affine_preimage(p: Polytope, f: AffineMap) -> Polytope:
    _check_dims(p, f.dim)
    bounded = p._cache.get('bounded') if f.invertible else None
    return Polytope(p.A @ f.matrix, p.b - p.A @ f.offset, bounded=bounded)


def is_empty(p: Polytope) -> bool:
    if 'empty' not in p._cache:
        if len(p) == 0:
            p._cache['empty'] = False
        else:
            constraints = linprog.halfspace_constraints(p.A, p.b)
            p._cache['empty'] = not linprog.feasible(constraints, p.dim)
    return p._cache['empty']


def is_bounded(p: Polytope) -> bool:
    """True when the recession cone {d : A d <= 0} is trivial."""
    if 'bounded' not in p._cache:
        if len(p) <= p.dim or np.linalg.matrix_rank(p.A) < p.dim:
            p._cache['bounded'] = False
        else:
            # normals positively span R^n  <=>  A^T y = 0 for some y >= 1
            m = len(p)
            constraints = [(p.A[:, j], linprog.EQ, 0.0) for j in range(p.dim)]
            lp = linprog.LinearProgram(np.zeros(m), constraints, 'min', [(1.0, None)] * m)
            p._cache['bounded'] = linprog.solve(lp).optimal
    return p._cache['bounded']


def contains(p: Polytope, x) -> bool:
    x = np.asarray(x, dtype=float)
    _check_dims(p, x.shape[0])
    if len(p) == 0:
        return True
    return bool(np.all(p.A @ x <= p.b + get_tolerances().eps_num))


def violation(p: Polytope, x) -> float:
    if len(p) == 0:
        return 0.0
    return float(max(0.0, np.max(p.A @ np.asarray(x, dtype=float) - p.b)))


def _merge_points(points: np.ndarray, tol: float) -> np.ndarray:
    kept: List[np.ndarray] = []
    for point in points:
        if all(np.linalg.norm(point - other) > tol for other in kept):
            kept.append(point)
    return np.array(kept) if kept else np.zeros((0, points.shape[1]))


def _order_ccw(points: np.ndarray) -> np.ndarray:
    centre = points.mean(axis=0)
    angles = np.arctan2(points[:, 1] - centre[1], points[:, 0] - centre[0])
    return points[np.argsort(angles, kind='stable')]


def vertices(p: Polytope) -> np.ndarray:
    """Vertex array of shape (k, dim); counter-clockwise in 2-D, lexicographic otherwise."""
    if 'vertices' in p._cache:
        return p._cache['vertices']
    dim = p.dim
    if len(p) and np.any(np.linalg.norm(p.A, axis=1) < _ZERO_ROW):
        result = np.zeros((0, dim))
    elif not is_bounded(p):
        if is_empty(p):
            result = np.zeros((0, dim))
        else:
            raise UnboundedPolytopeError("Vertex enumeration needs a bounded polytope")
    else:
        result = _enumerate_vertices(p)
    result.setflags(write=False)
    p._cache['vertices'] = result
    return result


def _enumerate_vertices(p: Polytope) -> np.ndarray:
    dim = p.dim
    tol = get_tolerances().eps_num * max(1.0, float(np.max(np.abs(p.b))) if len(p) else 1.0)
    combos = np.array(list(combinations(range(len(p)), dim)), dtype=int)
    if combos.size == 0:
        return np.zeros((0, dim))
    systems = p.A[combos]
    dets = np.linalg.det(systems)
    good = np.abs(dets) > 1e-12
    if not np.any(good):
        return np.zeros((0, dim))
    rhs = p.b[combos[good]]
    candidates = np.linalg.solve(systems[good], rhs[..., None])[..., 0]
    slack = candidates @ p.A.T - p.b
    candidates = candidates[np.all(slack <= tol, axis=1)]
    if len(candidates) == 0:
        return np.zeros((0, dim))
    points = _merge_points(candidates, max(tol, 1e-9) * 10)
    if dim == 2 and len(points) >= 3:
        return _order_ccw(points)
    order = np.lexsort(points.T[::-1])
    return points[order]


def shoelace_area(points: np.ndarray) -> float:
    if len(points) < 3:
        return 0.0
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def volume(p: Polytope) -> float:
    if 'volume' in p._cache:
        return p._cache['volume']
    if p.dim > 3:
        raise GeometryError(f"Volume is only supported up to dimension 3, got {p.dim}")
    pts = vertices(p)
    if len(pts) == 0:
        result = 0.0
    elif p.dim == 1:
        result = float(pts.max() - pts.min())
    elif p.dim == 2:
        result = abs(shoelace_area(pts))
    else:
        if len(pts) < 4:
            result = 0.0
        else:
            try:
                result = float(ConvexHull(pts).volume)
            except QhullError:
                result = 0.0
    p._cache['volume'] = result
    return result


def is_solid(p: Polytope) -> bool:
    """Nonempty interior (positive volume up to tolerance)."""
    if 'solid' not in p._cache:
        tol = get_tolerances()
        if p.dim <= 3 and is_bounded(p):
            p._cache['solid'] = volume(p) > tol.eps_vol
        else:
            _, radius = linprog.chebyshev_center(p.A, p.b)
            p._cache['solid'] = radius > tol.eps_num
    return p._cache['solid']


def interior_point(p: Polytope) -> np.ndarray:
    if 'interior' in p._cache:
        return p._cache['interior']
    if len(p) == 0:
        point = np.zeros(p.dim)
    else:
        centre, radius = linprog.chebyshev_center(p.A, p.b)
        if centre is None:
            raise EmptyPolytopeError("Empty polytope has no interior point")
        point = centre
        if radius <= get_tolerances().eps_num and p.dim <= 3 and is_bounded(p):
            pts = vertices(p)
            if len(pts):
                point = pts.mean(axis=0)
    point.setflags(write=False)
    p._cache['interior'] = point
    return point


def remove_redundant(p: Polytope) -> Polytope:
    """Drop rows that do not support a facet. Best effort: only for bounded solids of dim <= 3."""
    if p.dim > 3 or len(p) <= p.dim + 1 or not is_bounded(p) or not is_solid(p):
        return p
    pts = vertices(p)
    tol = get_tolerances().eps_num * max(1.0, float(np.max(np.abs(p.b)))) * 10
    tight = np.abs(pts @ p.A.T - p.b) <= tol
    keep = tight.sum(axis=0) >= p.dim
    if np.all(keep):
        return p
    reduced = Polytope(p.A[keep], p.b[keep], bounded=True)
    reduced._cache['vertices'] = pts
    return reduced


def difference(p: Polytope, q: Polytope) -> List[Polytope]:
    """Convex decomposition of the closure of p minus q.

    Piece k satisfies q's first k-1 rows and violates row k, so pieces only
    meet on boundaries.
    """
    _check_dims(q, p.dim)
    q = remove_redundant(q)
    pieces: List[Polytope] = []
    for k in range(len(q)):
        rows_A = np.vstack([p.A, q.A[:k], -q.A[k:k + 1]])
        rows_b = np.concatenate([p.b, q.b[:k], -q.b[k:k + 1]])
        piece = Polytope(rows_A, rows_b, bounded=p._cache.get('bounded'))
        if is_solid(piece):
            pieces.append(remove_redundant(piece))
    return pieces


def bounding_box(p: Polytope):
    pts = vertices(p)
    if len(pts) == 0:
        raise EmptyPolytopeError("Empty polytope has no bounding box")
    return pts.min(axis=0), pts.max(axis=0)
