"""Finite connected partitions: ordered lists of (polytope, payload) regions."""
from __future__ import annotations

from typing import Callable, Generic, Iterable, Iterator, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from src.core.exceptions import DimensionMismatchError, PointOutsideDomainError
from src.geometry.polytope import (
    Polytope,
    contains,
    intersect,
    is_bounded,
    is_solid,
    remove_redundant,
    vertices,
    violation,
    volume
)

T = TypeVar('T')
U = TypeVar('U')


class Fcp(Generic[T]):
    """Regions are closed; a point on a shared boundary belongs to the first region listed."""

    __slots__ = ('regions', 'dim')

    def __init__(self, regions: Iterable[Tuple[Polytope, T]], dim: Optional[int] = None):
        self.regions: List[Tuple[Polytope, T]] = list(regions)
        if dim is None:
            if not self.regions:
                raise DimensionMismatchError("Cannot infer dimension of an empty partition")
            dim = self.regions[0][0].dim
        for poly, _ in self.regions:
            if poly.dim != dim:
                raise DimensionMismatchError(f"Region of dimension {poly.dim} in a {dim}-dimensional partition")
        self.dim = dim

    @classmethod
    def single(cls, domain: Polytope, payload: T) -> 'Fcp[T]':
        return cls([(domain, payload)])

    def __len__(self) -> int:
        return len(self.regions)

    def __iter__(self) -> Iterator[Tuple[Polytope, T]]:
        return iter(self.regions)

    def __repr__(self) -> str:
        return f"Fcp(dim={self.dim}, regions={len(self.regions)})"

    def locate(self, x) -> Optional[int]:
        for idx, (poly, _) in enumerate(self.regions):
            if contains(poly, x):
                return idx
        return None

    def nearest(self, x) -> int:
        """Index of the first region with the smallest constraint violation at x."""
        violations = [violation(poly, x) for poly, _ in self.regions]
        return int(np.argmin(violations))

    def lookup(self, x) -> T:
        idx = self.locate(x)
        if idx is None:
            raise PointOutsideDomainError(f"Point {np.asarray(x).tolist()} lies in no region")
        return self.regions[idx][1]

    def map(self, fn: Callable[[T], U]) -> 'Fcp[U]':
        return Fcp([(poly, fn(payload)) for poly, payload in self.regions], self.dim)

    def restrict(self, domain: Polytope) -> 'Fcp[T]':
        """Solid intersections of every region with domain."""
        out = []
        for poly, payload in self.regions:
            piece = intersect(poly, domain)
            if is_solid(piece):
                out.append((remove_redundant(piece), payload))
        return Fcp(out, self.dim)

    def payloads(self) -> List[T]:
        return [payload for _, payload in self.regions]


def product_fcp(a: Fcp, b: Fcp, combine: Callable = lambda x, y: (x, y)) -> Fcp:
    """Common refinement of a and b, keeping intersections with nonempty interior."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"Cannot take the product of {a.dim}- and {b.dim}-dimensional partitions")
    out = []
    boxes_b = [region_box(poly) for poly, _ in b.regions]
    for poly_a, payload_a in a.regions:
        box_a = region_box(poly_a)
        for (poly_b, payload_b), box_b in zip(b.regions, boxes_b):
            if not boxes_overlap(box_a, box_b):
                continue
            piece = intersect(poly_a, poly_b)
            if is_solid(piece):
                out.append((remove_redundant(piece), combine(payload_a, payload_b)))
    return Fcp(out, a.dim)


def total_volume(fcp: Fcp) -> float:
    return float(sum(volume(poly) for poly, _ in fcp.regions))


def max_overlap(fcp: Fcp) -> float:
    worst = 0.0
    boxes = [region_box(poly) for poly, _ in fcp.regions]
    for i in range(len(fcp.regions)):
        for j in range(i + 1, len(fcp.regions)):
            if not boxes_overlap(boxes[i], boxes[j]):
                continue
            piece = intersect(fcp.regions[i][0], fcp.regions[j][0])
            worst = max(worst, volume(piece))
    return worst


def partition_issues(fcp: Fcp, domain: Polytope, rel_tol: float = 1e-6) -> List[str]:
    """Coverage and disjointness problems of fcp as a partition of domain (dim <= 3)."""
    issues = []
    domain_volume = volume(domain)
    covered = total_volume(fcp.restrict(domain))
    if abs(covered - domain_volume) > rel_tol * max(1.0, domain_volume):
        issues.append(f"regions cover volume {covered:.9g} of a domain with volume {domain_volume:.9g}")
    overlap = max_overlap(fcp)
    if overlap > rel_tol * max(1.0, domain_volume):
        issues.append(f"regions overlap with volume {overlap:.9g}")
    return issues


def format_polygon(label: str, poly: Polytope, value: float) -> str:
    """One polygon-dump line: label;x,y;...;value with counter-clockwise vertices."""
    pts = vertices(poly)
    coords = ';'.join(','.join(f"{c:.12g}" for c in point) for point in pts)
    return f"{label};{coords};{value:.12g}"


def dump_polygons(lines: Sequence[Tuple[str, Polytope, float]]) -> str:
    return ''.join(format_polygon(label, poly, value) + '\n' for label, poly, value in lines)


def parse_polygon_line(line: str) -> Tuple[str, np.ndarray, float]:
    parts = line.rstrip('\n').split(';')
    label = parts[0]
    value = float(parts[-1])
    points = np.array([[float(c) for c in part.split(',')] for part in parts[1:-1]])
    return label, points, value


def _box(poly: Polytope):
    if not is_bounded(poly):
        return np.full(poly.dim, -np.inf), np.full(poly.dim, np.inf)
    pts = vertices(poly)
    if len(pts) == 0:
        return None
    return pts.min(axis=0), pts.max(axis=0)


def boxes_overlap(a, b, margin: float = 0.0) -> bool:
    """Axis-aligned boxes share interior points (None is the empty box)."""
    if a is None or b is None:
        return False
    return bool(np.all(a[0] < b[1] - margin) and np.all(b[0] < a[1] - margin))


def region_box(poly: Polytope):
    """Cached axis-aligned bounding box of a bounded polytope, None when empty."""
    if 'box' not in poly._cache:
        poly._cache['box'] = _box(poly)
    return poly._cache['box']
